#include "pirsim/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace pirsim {
namespace {

// Sub-stream labels under one retrieval master seed.
constexpr std::uint64_t kStreamQuery = 1;
constexpr std::uint64_t kStreamNoise = 2;

}  // namespace

std::vector<std::uint64_t> answer_block_symbols(const QueryPair& query, const MessageStore& store,
                                                std::size_t block_index, int group_id,
                                                std::size_t k) {
    if (group_id != 1 && group_id != 2) throw std::invalid_argument("answer: group must be 1 or 2");
    const auto& q = group_id == 1 ? query.q1 : query.q2;
    if (q.size() != store.num_messages)
        throw std::invalid_argument("answer: query length must match message count");
    const std::int64_t p = std::int64_t(store.p);
    std::vector<std::uint64_t> u(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t l = block_index * k + j;
        if (l >= store.length) break;  // zero padding past the message end
        std::int64_t acc = 0;
        for (std::size_t m = 0; m < store.num_messages; ++m)
            acc += std::int64_t(q[m]) * std::int64_t(store.at(m, l));
        acc %= p;
        if (acc < 0) acc += p;
        u[j] = std::uint64_t(acc);
    }
    return u;
}

double combining_gain(const RoundPlan& plan, std::size_t num_servers) {
    if (plan.mode == Mode::non_fading) return double(num_servers / 2);
    return plan.partition.h_tilde1;
}

double effective_sigma_y2(const RoundPlan& plan, const ChannelRealization& channel) {
    double gain = combining_gain(plan, channel.num_servers);
    return channel.sigma_y2 / (gain * gain);
}

RoundPlan plan_round(const ChannelRealization& channel, double power, Mode mode,
                     const PartitionSource& source) {
    if (!(power > 0.0) || !std::isfinite(power))
        throw std::invalid_argument("plan: power must be positive and finite");
    if (channel.num_servers < 2) throw std::invalid_argument("plan: need at least two servers");
    RoundPlan plan;
    plan.power = power;
    plan.mode = mode;
    if (mode == Mode::non_fading) {
        std::size_t m = channel.num_servers / 2;
        std::vector<std::size_t> s1(m), s2(m);
        for (std::size_t j = 0; j < m; ++j) {
            s1[j] = j;
            s2[j] = m + j;
        }
        plan.partition = make_partition(channel.h, channel.g, s1, s2);
    } else if (const auto* given = std::get_if<PartitionPlan>(&source)) {
        plan.partition = make_partition(channel.h, channel.g, given->group1, given->group2);
    } else if (std::get<Optimizer>(source) == Optimizer::brute_force) {
        plan.partition = optimize_partition_bruteforce(channel.h, channel.g, power,
                                                       channel.sigma_y2, channel.sigma_w2);
    } else {
        plan.partition = optimize_partition_greedy(channel.h, channel.g, power, channel.sigma_y2,
                                                   channel.sigma_w2);
    }
    double gain = combining_gain(plan, channel.num_servers);
    // alpha stays defined in the noiseless test mode: variance 0 gives alpha 1.
    double eff = channel.sigma_y2 / (gain * gain);
    plan.alpha = eff > 0.0 ? alpha_opt(power, eff).alpha : 1.0;
    return plan;
}

std::vector<double> server_respond(const QueryPair& query, const MessageStore& store,
                                   std::size_t block_index, const RoundPlan& plan,
                                   const NestedLatticePair& pair, int group_id,
                                   std::size_t server_index) {
    if (group_id != 1 && group_id != 2) throw std::invalid_argument("respond: group must be 1 or 2");
    if (server_index >= plan.partition.sign_flips.size())
        throw std::invalid_argument("respond: server index out of range");
    std::vector<std::uint64_t> u = answer_block_symbols(query, store, block_index, group_id, pair.k);
    std::uint64_t group_seed = group_id == 1 ? plan.seed_group1 : plan.seed_group2;
    LatticeCodeword cw =
        encode_and_sample(u, std::sqrt(plan.power), derive_seed(group_seed, block_index), pair);
    double factor = plan.partition.sign_flips[server_index];
    if (group_id == 2) factor *= plan.partition.scale;
    for (auto& v : cw.x) v *= factor;
    return cw.x;
}

std::vector<std::uint64_t> user_decode(std::span<const double> y, const RoundPlan& plan,
                                       const NestedLatticePair& pair, std::size_t num_servers) {
    double f = plan.alpha / combining_gain(plan, num_servers);
    std::vector<double> scaled(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) scaled[j] = f * y[j];
    std::vector<double> q = quantize_fine(scaled, pair);
    std::vector<double> v = mod_coarse(q, pair);
    return decode_coset(v, pair);
}

RetrievalResult run_retrieval(const MessageStore& store, std::size_t index,
                              const ChannelRealization& channel, const NestedLatticePair& pair,
                              double power, Mode mode, std::uint64_t master_seed,
                              const PartitionSource& source, RoundTranscript* transcript) {
    if (index < 1 || index > store.num_messages)
        throw std::invalid_argument("retrieval: index out of range");
    if (store.p != pair.p) throw std::invalid_argument("retrieval: store and lattice p differ");

    Rng query_rng(derive_seed(master_seed, kStreamQuery));
    QueryPair query = gen_query_pair(index, store.num_messages, query_rng);
    RoundPlan plan = plan_round(channel, power, mode, source);
    plan.seed_group1 = query.seed1;
    plan.seed_group2 = query.seed2;

    const std::size_t blocks = (store.length + pair.k - 1) / pair.k;
    const bool b_i = query.b[index - 1] != 0;
    std::vector<std::uint64_t> decoded(store.length, 0);
    if (transcript) {
        transcript->query = query;
        transcript->plan = plan;
        transcript->blocks.clear();
    }

    std::vector<std::vector<double>> signals(channel.num_servers);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        for (auto& s : signals) s.clear();  // idle servers stay silent
        for (auto k : plan.partition.group1)
            signals[k] = server_respond(query, store, blk, plan, pair, 1, k);
        for (auto k : plan.partition.group2)
            signals[k] = server_respond(query, store, blk, plan, pair, 2, k);
        Rng noise_rng(derive_seed(master_seed, kStreamNoise, blk));
        std::vector<double> y = transmit_mac(signals, channel.h, channel.sigma_y2, noise_rng);
        std::vector<std::uint64_t> u = user_decode(y, plan, pair, channel.num_servers);
        if (transcript) transcript->blocks.push_back({blk, u});
        std::vector<std::uint64_t> symbols = recover_message_sign(u, b_i, store.p);
        for (std::size_t j = 0; j < pair.k; ++j) {
            std::size_t l = blk * pair.k + j;
            if (l < store.length) decoded[l] = symbols[j];
        }
    }

    RetrievalResult res;
    res.decoded = std::move(decoded);
    for (std::size_t l = 0; l < store.length; ++l)
        if (res.decoded[l] != store.at(index - 1, l)) ++res.symbol_errors;
    res.message_error = res.symbol_errors > 0;
    res.n_total = blocks * pair.n;
    res.achieved_rate = double(store.length) * std::log(double(store.p)) / double(res.n_total);
    if (transcript) transcript->message = res.decoded;
    return res;
}

}  // namespace pirsim
