#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pirsim/channel.hpp"
#include "pirsim/field.hpp"
#include "pirsim/lattice.hpp"
#include "pirsim/protocol.hpp"
#include "pirsim/rates.hpp"

namespace pirsim {

// All JSON uses snake_case keys; server indices and message indices are
// 1-based on the wire. Doubles round-trip exactly (shortest representation).

nlohmann::json to_json(const QueryPair& q);
QueryPair query_pair_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NestedLatticePair& pair);
NestedLatticePair lattice_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChannelRealization& ch);
ChannelRealization channel_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PartitionPlan& plan);
nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const GoodnessReport& r);
nlohmann::json to_json(const RoundPlan& plan, std::size_t num_servers);
nlohmann::json to_json(const RoundTranscript& t, std::size_t num_servers);

// Message store CSV: one message per row, decimal residues, no header.
void write_store_csv(std::ostream& os, const MessageStore& store);
MessageStore read_store_csv(std::istream& is, std::uint64_t p);

// Generic numeric table with a header line; used for codeword dumps, signal
// traces and sweep results. Doubles use shortest round-trip formatting.
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace pirsim
