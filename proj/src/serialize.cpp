#include "pirsim/serialize.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pirsim {
namespace {

std::vector<std::size_t> to_one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] + 1;
    return out;
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::eavesdropper1: return "eavesdropper1";
        case Branch::eavesdropper2: return "eavesdropper2";
        default: return "self_noise";
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("csv: cannot format value");
    return std::string(buf, ptr);
}

nlohmann::json to_json(const QueryPair& q) {
    nlohmann::json j;
    j["i"] = q.index;
    j["b"] = q.b;
    j["Q1"] = q.q1;
    j["Q2"] = q.q2;
    j["seed1"] = q.seed1;
    j["seed2"] = q.seed2;
    return j;
}

QueryPair query_pair_from_json(const nlohmann::json& j) {
    std::vector<std::uint8_t> b = j.at("b").get<std::vector<std::uint8_t>>();
    QueryPair q = make_query_pair(j.at("i").get<std::size_t>(), b.size(), b,
                                  j.at("seed1").get<std::uint64_t>(),
                                  j.at("seed2").get<std::uint64_t>());
    auto q1 = j.at("Q1").get<std::vector<std::int8_t>>();
    auto q2 = j.at("Q2").get<std::vector<std::int8_t>>();
    if (q1 != q.q1 || q2 != q.q2)
        throw std::invalid_argument("query json: Q1/Q2 inconsistent with (i, b)");
    return q;
}

nlohmann::json to_json(const NestedLatticePair& pair) {
    nlohmann::json j;
    j["n"] = pair.n;
    j["p"] = pair.p;
    j["k"] = pair.k;
    j["gamma"] = pair.gamma;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < pair.k; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < pair.n; ++c) row.push_back(pair.gen[r * pair.n + c]);
        rows.push_back(std::move(row));
    }
    j["G_code"] = std::move(rows);
    return j;
}

NestedLatticePair lattice_from_json(const nlohmann::json& j) {
    std::size_t n = j.at("n").get<std::size_t>();
    std::uint64_t p = j.at("p").get<std::uint64_t>();
    std::size_t k = j.at("k").get<std::size_t>();
    double gamma = j.at("gamma").get<double>();
    if (!j.contains("G_code") || j.at("G_code").is_null())
        return build_nested_pair(n, p, k, gamma);
    std::vector<std::uint64_t> gen;
    gen.reserve(k * n);
    for (const auto& row : j.at("G_code")) {
        if (row.size() != n) throw std::invalid_argument("lattice json: generator row length");
        for (const auto& v : row) gen.push_back(v.get<std::uint64_t>());
    }
    if (gen.size() != k * n) throw std::invalid_argument("lattice json: generator shape");
    return build_nested_pair(n, p, k, gamma, std::move(gen));
}

nlohmann::json to_json(const ChannelRealization& ch) {
    nlohmann::json j;
    j["num_servers"] = ch.num_servers;
    j["h"] = ch.h;
    j["g"] = ch.g;
    j["sigma_y2"] = ch.sigma_y2;
    j["sigma_w2"] = ch.sigma_w2;
    return j;
}

ChannelRealization channel_from_json(const nlohmann::json& j) {
    ChannelRealization ch;
    ch.h = j.at("h").get<std::vector<double>>();
    ch.g = j.at("g").get<std::vector<double>>();
    ch.num_servers = j.contains("num_servers") ? j.at("num_servers").get<std::size_t>()
                                               : ch.h.size();
    ch.sigma_y2 = j.at("sigma_y2").get<double>();
    ch.sigma_w2 = j.at("sigma_w2").get<double>();
    if (ch.h.size() != ch.num_servers || ch.g.size() != ch.num_servers)
        throw std::invalid_argument("channel json: gain vector lengths");
    if (ch.num_servers < 2) throw std::invalid_argument("channel json: need two servers");
    if (ch.sigma_y2 < 0.0 || ch.sigma_w2 < 0.0)
        throw std::invalid_argument("channel json: negative variance");
    return ch;
}

nlohmann::json to_json(const PartitionPlan& plan) {
    nlohmann::json j;
    j["group1"] = to_one_based(plan.group1);
    j["group2"] = to_one_based(plan.group2);
    j["h_tilde1"] = plan.h_tilde1;
    j["h_tilde2"] = plan.h_tilde2;
    j["g_tilde1"] = plan.g_tilde1;
    j["g_tilde2"] = plan.g_tilde2;
    j["scale"] = plan.scale;
    j["sign_flips"] = plan.sign_flips;
    return j;
}

nlohmann::json to_json(const RateReport& r) {
    nlohmann::json j;
    j["rate_nats"] = r.rate_nats;
    j["rate_bits"] = r.rate_bits();
    j["binding_branch"] = branch_name(r.binding_branch);
    j["snr_y"] = r.snr_y;
    j["snr_w1"] = r.snr_w1;
    j["snr_w2"] = r.snr_w2;
    j["alpha_opt"] = r.alpha_opt;
    j["feasible"] = r.feasible;
    return j;
}

nlohmann::json to_json(const GoodnessReport& r) {
    nlohmann::json j;
    j["vnr_fine"] = r.vnr_fine;
    j["vnr_coarse"] = r.vnr_coarse;
    j["awgn_good"] = r.awgn_good;
    j["secrecy_good"] = r.secrecy_good;
    j["power_cond1"] = r.power_cond1;
    j["power_cond2"] = r.power_cond2;
    return j;
}

nlohmann::json to_json(const RoundPlan& plan, std::size_t num_servers) {
    nlohmann::json j;
    j["partition"] = to_json(plan.partition);
    j["power"] = plan.power;
    j["alpha"] = plan.alpha;
    j["mode"] = plan.mode == Mode::non_fading ? "non_fading" : "fading";
    j["seed_group1"] = plan.seed_group1;
    j["seed_group2"] = plan.seed_group2;
    j["combining_gain"] = combining_gain(plan, num_servers);
    return j;
}

nlohmann::json to_json(const RoundTranscript& t, std::size_t num_servers) {
    nlohmann::json j;
    j["query"] = to_json(t.query);
    j["plan"] = to_json(t.plan, num_servers);
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : t.blocks) {
        nlohmann::json jb;
        jb["block"] = b.block;
        jb["decoded_symbols"] = b.decoded_symbols;
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    j["message"] = t.message;
    return j;
}

void write_store_csv(std::ostream& os, const MessageStore& store) {
    for (std::size_t m = 0; m < store.num_messages; ++m) {
        for (std::size_t l = 0; l < store.length; ++l) {
            if (l) os << ',';
            os << store.at(m, l);
        }
        os << '\n';
    }
}

MessageStore read_store_csv(std::istream& is, std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("store csv: p must be prime");
    MessageStore store;
    store.p = p;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(row, cell, ',')) {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw std::invalid_argument("store csv: bad symbol '" + cell + "'");
            if (v >= p) throw std::invalid_argument("store csv: symbol not reduced mod p");
            store.symbols.push_back(v);
            ++count;
        }
        if (store.length == 0) store.length = count;
        if (count != store.length)
            throw std::invalid_argument("store csv: rows have different lengths");
        ++store.num_messages;
    }
    if (store.num_messages == 0) throw std::invalid_argument("store csv: empty file");
    return store;
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) os << ',';
        os << header[c];
    }
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::invalid_argument("csv: row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << format_double(row[c]);
        }
        os << '\n';
    }
}

}  // namespace pirsim
