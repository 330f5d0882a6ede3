#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pirsim/channel.hpp"
#include "pirsim/field.hpp"
#include "pirsim/lattice.hpp"
#include "pirsim/rates.hpp"

namespace pirsim {

enum class Mode { non_fading, fading };
enum class Optimizer { brute_force, greedy };

// Everything servers and user agree on for one retrieval round. Group 1
// transmits answers to q1 seeded by seed_group1, group 2 likewise; the group
// with the larger aggregate gain (group 2 after relabeling) scales by
// partition.scale and every server applies its sign flip.
struct RoundPlan {
    PartitionPlan partition;
    double power = 0.0;
    double alpha = 0.0;        // MMSE scaling for the mode's effective noise
    Mode mode = Mode::non_fading;
    std::uint64_t seed_group1 = 0;
    std::uint64_t seed_group2 = 0;
};

// Receiver-side combining gain: group size floor(N/2) in non-fading mode,
// aggregate h_tilde1 in fading mode.
double combining_gain(const RoundPlan& plan, std::size_t num_servers);

// Effective receiver noise variance after combining: sigma_y2 / gain^2.
double effective_sigma_y2(const RoundPlan& plan, const ChannelRealization& channel);

using PartitionSource = std::variant<Optimizer, PartitionPlan>;

// Builds the round plan. Non-fading mode splits servers {0..m-1} / {m..2m-1},
// m = floor(N/2), leaving the rest idle; fading mode takes the partition from
// the requested optimizer or uses the one given. alpha is set to the MMSE
// minimizer for the mode's effective noise. Seeds are not filled here; they
// come from the query pair.
RoundPlan plan_round(const ChannelRealization& channel, double power, Mode mode,
                     const PartitionSource& source = Optimizer::greedy);

// The k answer symbols a group commits to for one block: the group's query
// applied to the store columns [block*k, block*k + k), zero-padded past the
// message end.
std::vector<std::uint64_t> answer_block_symbols(const QueryPair& query, const MessageStore& store,
                                                std::size_t block_index, int group_id,
                                                std::size_t k);

// One server's transmitted block: the k answer symbols of the requested
// block are encoded and dithered with the group seed, then the server's sign
// flip (and the group-2 scale) is applied. Servers of the same group and
// sign transmit bit-identical blocks.
std::vector<double> server_respond(const QueryPair& query, const MessageStore& store,
                                   std::size_t block_index, const RoundPlan& plan,
                                   const NestedLatticePair& pair, int group_id,
                                   std::size_t server_index);

// Scales y by alpha/gain, quantizes to the fine lattice, reduces mod the
// coarse lattice and reads the coset symbols; always returns a coset.
std::vector<std::uint64_t> user_decode(std::span<const double> y, const RoundPlan& plan,
                                       const NestedLatticePair& pair, std::size_t num_servers);

struct RetrievalResult {
    std::vector<std::uint64_t> decoded;  // length = store.length
    std::size_t symbol_errors = 0;
    bool message_error = false;
    std::size_t n_total = 0;      // channel uses consumed
    double achieved_rate = 0.0;   // length * ln p / n_total
};

struct BlockRecord {
    std::size_t block = 0;
    std::vector<std::uint64_t> decoded_symbols;  // pre-sign coset decision
};

// Audit record of one retrieval: only user-visible quantities.
struct RoundTranscript {
    QueryPair query;
    RoundPlan plan;
    std::vector<BlockRecord> blocks;
    std::vector<std::uint64_t> message;  // final sign-corrected symbols
};

// Full round for message index (1-based): query generation, per-block
// transmissions over the MAC, decoding, sign recovery. Everything is a
// function of (inputs, master_seed). Fading partitions default to the greedy
// optimizer unless a source is given.
RetrievalResult run_retrieval(const MessageStore& store, std::size_t index,
                              const ChannelRealization& channel, const NestedLatticePair& pair,
                              double power, Mode mode, std::uint64_t master_seed,
                              const PartitionSource& source = Optimizer::greedy,
                              RoundTranscript* transcript = nullptr);

}  // namespace pirsim
