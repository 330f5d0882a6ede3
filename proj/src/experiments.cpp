#include "pirsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pirsim/parallel.hpp"
#include "pirsim/serialize.hpp"

namespace pirsim {
namespace {

// Sub-stream labels under one experiment master seed.
constexpr std::uint64_t kTagStore = 0x01;
constexpr std::uint64_t kTagTrial = 0x02;
constexpr std::uint64_t kTagRetrieval = 0x03;
constexpr std::uint64_t kTagChannel = 0x04;
constexpr std::uint64_t kTagEavesNoise = 0x05;
constexpr std::uint64_t kTagSymbols = 0x06;
constexpr std::uint64_t kTagDither1 = 0x07;
constexpr std::uint64_t kTagDither2 = 0x08;
constexpr std::uint64_t kTagGains = 0x09;
constexpr std::uint64_t kTagUserNoise = 0x0A;

constexpr std::size_t kChunk = 256;  // trials per work unit; fixed for determinism

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

NestedLatticePair pair_from(const ScenarioConfig& c) {
    return build_nested_pair(c.n, c.p, c.k, c.gamma);
}

ChannelRealization channel_for_trial(const ScenarioConfig& c, Rng& rng) {
    if (c.mode_enum() == Mode::fading)
        return draw_channel(c.num_servers, c.sigma_y2, c.sigma_w2, rng);
    return unit_channel(c.num_servers, c.sigma_y2, c.sigma_w2);
}

std::vector<std::uint64_t> random_symbols(std::size_t k, std::uint64_t p, Rng& rng) {
    std::vector<std::uint64_t> u(k);
    for (auto& v : u) v = rng.below(p);
    return u;
}

}  // namespace

Mode ScenarioConfig::mode_enum() const {
    if (mode == "non_fading") return Mode::non_fading;
    if (mode == "fading") return Mode::fading;
    throw std::invalid_argument("config: mode must be non_fading or fading");
}

AdversaryKnowledge ScenarioConfig::knowledge_enum() const {
    if (adversary_knowledge == "own_signal") return AdversaryKnowledge::own_signal;
    if (adversary_knowledge == "full_group") return AdversaryKnowledge::full_group;
    throw std::invalid_argument("config: adversary_knowledge must be own_signal or full_group");
}

void ScenarioConfig::validate() const {
    if (num_servers < 2) throw std::invalid_argument("config: num_servers must be >= 2");
    if (num_messages == 0) throw std::invalid_argument("config: num_messages must be positive");
    if (message_length == 0) throw std::invalid_argument("config: message_length must be positive");
    if (!is_prime(p)) throw std::invalid_argument("config: p must be prime");
    if (k == 0 || k > n) throw std::invalid_argument("config: need 0 < k <= n");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("config: gamma must be positive and finite");
    if (!(power > 0.0) || !std::isfinite(power))
        throw std::invalid_argument("config: power must be positive and finite");
    if (sigma_y2 < 0.0 || sigma_w2 < 0.0)
        throw std::invalid_argument("config: noise variances must be nonnegative");
    if (trials == 0) throw std::invalid_argument("config: trials must be positive");
    mode_enum();
    knowledge_enum();
}

nlohmann::json to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["num_servers"] = c.num_servers;
    j["num_messages"] = c.num_messages;
    j["message_length"] = c.message_length;
    j["p"] = c.p;
    j["k"] = c.k;
    j["n"] = c.n;
    j["gamma"] = c.gamma;
    j["power"] = c.power;
    j["sigma_y2"] = c.sigma_y2;
    j["sigma_w2"] = c.sigma_w2;
    j["mode"] = c.mode;
    j["trials"] = c.trials;
    j["master_seed"] = c.master_seed;
    j["adversary_knowledge"] = c.adversary_knowledge;
    return j;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig c;
    auto load = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    load("num_servers", c.num_servers);
    load("num_messages", c.num_messages);
    load("message_length", c.message_length);
    load("p", c.p);
    load("k", c.k);
    load("n", c.n);
    load("gamma", c.gamma);
    load("power", c.power);
    load("sigma_y2", c.sigma_y2);
    load("sigma_w2", c.sigma_w2);
    load("mode", c.mode);
    load("trials", c.trials);
    load("master_seed", c.master_seed);
    load("adversary_knowledge", c.adversary_knowledge);
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"num_servers", "num_messages", "message_length", "p", "k",
                                      "n", "gamma", "power", "sigma_y2", "sigma_w2", "mode",
                                      "trials", "master_seed", "adversary_knowledge"};
        bool ok = false;
        for (const char* name : known) ok = ok || it.key() == name;
        if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
    c.validate();
    return c;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config"] = config_echo;
    nlohmann::json est = nlohmann::json::object();
    for (const auto& e : estimates) {
        est[e.name] = {{"value", e.interval.value},
                       {"ci_lo", e.interval.lo},
                       {"ci_hi", e.interval.hi},
                       {"trials", e.trials}};
    }
    j["estimates"] = std::move(est);
    nlohmann::json chk = nlohmann::json::array();
    for (const auto& c : checks) {
        chk.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"observed", c.observed},
                       {"threshold", c.threshold}});
    }
    j["checks"] = std::move(chk);
    return j;
}

const NamedEstimate& ExperimentReport::estimate(const std::string& name) const {
    for (const auto& e : estimates)
        if (e.name == name) return e;
    throw std::invalid_argument("report: no estimate named " + name);
}

const CheckOutcome& ExperimentReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::invalid_argument("report: no check named " + name);
}

bool ExperimentReport::all_checks_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

ExperimentReport estimate_error_prob(const ScenarioConfig& config) {
    Timer timer;
    config.validate();
    const NestedLatticePair pair = pair_from(config);
    const MessageStore store =
        make_message_store(config.p, config.num_messages, config.message_length,
                           derive_seed(config.master_seed, kTagStore));
    const Mode mode = config.mode_enum();

    const std::size_t trials = std::size_t(config.trials);
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> msg_errors(num_chunks, 0), sym_errors(num_chunks, 0);

    parallel_chunks(trials, kChunk, [&](std::size_t begin, std::size_t end) {
        const std::size_t chunk_id = begin / kChunk;
        std::uint64_t msg = 0, sym = 0;
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(derive_seed(config.master_seed, kTagTrial, t));
            std::size_t index = 1 + std::size_t(rng.below(config.num_messages));
            ChannelRealization channel = channel_for_trial(config, rng);
            RetrievalResult res =
                run_retrieval(store, index, channel, pair, config.power, mode,
                              derive_seed(config.master_seed, kTagRetrieval, t));
            msg += res.message_error ? 1 : 0;
            sym += res.symbol_errors;
        }
        msg_errors[chunk_id] = msg;
        sym_errors[chunk_id] = sym;
    });

    std::uint64_t total_msg = 0, total_sym = 0;
    for (std::size_t c = 0; c < num_chunks; ++c) {
        total_msg += msg_errors[c];
        total_sym += sym_errors[c];
    }
    const std::uint64_t symbol_draws = config.trials * config.message_length;

    ExperimentReport rep;
    rep.experiment = "error_prob";
    rep.config_echo = to_json(config);
    rep.estimates.push_back(
        {"message_error_rate", wilson_interval(total_msg, config.trials), config.trials});
    rep.estimates.push_back(
        {"symbol_error_rate", wilson_interval(total_sym, symbol_draws), symbol_draws});
    double ser = rep.estimates.back().interval.value;
    rep.checks.push_back({"symbol_error_rate_below_1e-3", ser < 1e-3, ser, 1e-3});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

ExperimentReport measure_equivalent_noise(const ScenarioConfig& config) {
    Timer timer;
    config.validate();
    if (config.sigma_y2 <= 0.0)
        throw std::invalid_argument("equivalent noise: sigma_y2 must be positive");
    const NestedLatticePair pair = pair_from(config);
    Rng chan_rng(derive_seed(config.master_seed, kTagChannel));
    const ChannelRealization channel = channel_for_trial(config, chan_rng);
    const RoundPlan plan = plan_round(channel, config.power, config.mode_enum());
    const double gain = combining_gain(plan, config.num_servers);
    const double sigma_eff2 = config.sigma_y2 / (gain * gain);
    const MmseScaling mmse = alpha_opt(config.power, sigma_eff2);
    const double sd_eff = std::sqrt(sigma_eff2);

    const std::size_t trials = std::size_t(config.trials);
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Moments> acc(num_chunks);

    parallel_chunks(trials, kChunk, [&](std::size_t begin, std::size_t end) {
        const std::size_t chunk_id = begin / kChunk;
        Moments m;
        const double sigma = std::sqrt(config.power);
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(derive_seed(config.master_seed, kTagTrial, t));
            auto u1 = random_symbols(pair.k, pair.p, rng);
            auto u2 = random_symbols(pair.k, pair.p, rng);
            auto x1 = encode_and_sample(u1, sigma, derive_seed(config.master_seed, kTagDither1, t),
                                        pair);
            auto x2 = encode_and_sample(u2, sigma, derive_seed(config.master_seed, kTagDither2, t),
                                        pair);
            Rng noise(derive_seed(config.master_seed, kTagUserNoise, t));
            double ss = 0.0;
            for (std::size_t j = 0; j < pair.n; ++j) {
                double v = (plan.alpha - 1.0) * (x1.x[j] + x2.x[j]) +
                           plan.alpha * sd_eff * noise.gaussian();
                ss += v * v;
            }
            m.add(ss / double(pair.n));
        }
        acc[chunk_id] = m;
    });

    Moments total;
    for (const auto& m : acc) total.merge(m);

    ExperimentReport rep;
    rep.experiment = "equivalent_noise";
    rep.config_echo = to_json(config);
    rep.estimates.push_back({"equivalent_noise_variance", total.mean_ci(), config.trials});
    rep.estimates.push_back(
        {"predicted_variance", {mmse.sigma_tilde2, mmse.sigma_tilde2, mmse.sigma_tilde2}, 0});
    double rel = std::abs(total.mean() / mmse.sigma_tilde2 - 1.0);
    rep.checks.push_back({"equivalent_noise_within_3pct", rel <= 0.03, rel, 0.03});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

// Prior part of the coset likelihood: log sum over lattice points of the
// transmit weight, per (coset, coordinate); range covers 12 sigma of mass.
std::vector<double> map_log_priors(const NestedLatticePair& pair, double power) {
    const double step = pair.step();
    const double sp = std::sqrt(power);
    const double inv2p = 1.0 / (2.0 * power);
    std::vector<double> out(pair.num_cosets * pair.n);
    for (std::size_t idx = 0; idx < pair.num_cosets; ++idx) {
        for (std::size_t j = 0; j < pair.n; ++j) {
            const double lam = pair.offsets[idx * pair.n + j];
            long long lo = (long long)(std::ceil((-12.0 * sp - lam) / step));
            long long hi = (long long)(std::floor((12.0 * sp - lam) / step));
            if (hi < lo) {
                lo = std::llround(-lam / step);
                hi = lo;
            }
            double maxlog = -std::numeric_limits<double>::infinity();
            double s = 0.0;
            for (long long m = lo; m <= hi; ++m) {
                double x = lam + step * double(m);
                double l = -x * x * inv2p;
                if (l > maxlog) {
                    s = s * std::exp(maxlog - l) + 1.0;
                    maxlog = l;
                } else {
                    s += std::exp(l - maxlog);
                }
            }
            out[idx * pair.n + j] = maxlog + std::log(s);
        }
    }
    return out;
}

std::vector<std::uint64_t> map_decode_coset(std::span<const double> z, double gain, double power,
                                            double sigma_w, const NestedLatticePair& pair,
                                            const std::vector<double>& log_priors) {
    if (z.size() != pair.n) throw std::invalid_argument("map: observation length must equal n");
    const double step = pair.step();
    const double sn = std::max(sigma_w, 1e-9 * std::sqrt(power));  // noiseless floor
    const double inv2p = 1.0 / (2.0 * power);
    const double inv2n = 1.0 / (2.0 * sn * sn);
    // Posterior over the transmitted value x given z: proportional to
    // exp(-x^2/2P) exp(-(z - a x)^2 / 2 sn^2); mean mu, std su below.
    const double denom = gain * gain * power + sn * sn;
    const double su = std::sqrt(power * sn * sn / denom);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < pair.num_cosets; ++idx) {
        double score = 0.0;
        for (std::size_t j = 0; j < pair.n; ++j) {
            const double lam = pair.offsets[idx * pair.n + j];
            const double mu = z[j] * gain * power / denom;
            long long lo = (long long)(std::ceil((mu - 12.0 * su - lam) / step));
            long long hi = (long long)(std::floor((mu + 12.0 * su - lam) / step));
            long long center = std::llround((mu - lam) / step);
            if (center < lo) lo = center;
            if (center > hi) hi = center;
            double maxlog = -std::numeric_limits<double>::infinity();
            double s = 0.0;
            for (long long m = lo; m <= hi; ++m) {
                double x = lam + step * double(m);
                double d = z[j] - gain * x;
                double l = -x * x * inv2p - d * d * inv2n;
                if (l > maxlog) {
                    s = s * std::exp(maxlog - l) + 1.0;
                    maxlog = l;
                } else {
                    s += std::exp(l - maxlog);
                }
            }
            score += maxlog + std::log(s) - log_priors[idx * pair.n + j];
        }
        if (score > best_score) {  // ties keep the smallest coset index
            best_score = score;
            best = idx;
        }
    }
    return pair.coset_symbols(best);
}

ExperimentReport estimate_eavesdropper_advantage(const ScenarioConfig& config) {
    Timer timer;
    config.validate();
    const NestedLatticePair pair = pair_from(config);
    if (pair.num_cosets > 10000)
        throw std::invalid_argument("eavesdropper: p^k exceeds the 1e4 enumeration guard");
    const MessageStore store =
        make_message_store(config.p, config.num_messages, config.message_length,
                           derive_seed(config.master_seed, kTagStore));
    const Mode mode = config.mode_enum();
    const AdversaryKnowledge knowledge = config.knowledge_enum();
    const std::vector<double> log_priors = map_log_priors(pair, config.power);
    const double sigma_w = std::sqrt(config.sigma_w2);

    const std::size_t trials = std::size_t(config.trials);
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> wins(num_chunks, 0);

    parallel_chunks(trials, kChunk, [&](std::size_t begin, std::size_t end) {
        const std::size_t chunk_id = begin / kChunk;
        std::uint64_t w = 0;
        std::vector<std::vector<double>> signals(config.num_servers);
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(derive_seed(config.master_seed, kTagTrial, t));
            std::size_t index = 1 + std::size_t(rng.below(config.num_messages));
            ChannelRealization channel = channel_for_trial(config, rng);
            QueryPair query = gen_query_pair(index, config.num_messages, rng);
            RoundPlan plan = plan_round(channel, config.power, mode);
            plan.seed_group1 = query.seed1;
            plan.seed_group2 = query.seed2;

            for (auto& s : signals) s.clear();
            for (auto k : plan.partition.group1)
                signals[k] = server_respond(query, store, 0, plan, pair, 1, k);
            for (auto k : plan.partition.group2)
                signals[k] = server_respond(query, store, 0, plan, pair, 2, k);
            Rng noise(derive_seed(config.master_seed, kTagEavesNoise, t));
            std::vector<double> wobs = transmit_mac(signals, channel.g, config.sigma_w2, noise);

            // Aggregate eavesdropper-side gain on each group's codeword.
            double a1 = 0.0, a2 = 0.0;
            for (auto k : plan.partition.group1)
                a1 += channel.g[k] * plan.partition.sign_flips[k];
            for (auto k : plan.partition.group2)
                a2 += channel.g[k] * plan.partition.sign_flips[k];
            a2 *= plan.partition.scale;

            // The adversary joins the group whose opposite signal arrives
            // strongest at its antenna and decodes that signal's coset.
            const bool target_is_group1 = std::abs(a1) >= std::abs(a2);
            const auto& adv_group =
                target_is_group1 ? plan.partition.group2 : plan.partition.group1;
            const double target_gain = target_is_group1 ? a1 : a2;
            const int target_group_id = target_is_group1 ? 1 : 2;

            std::vector<double> z;
            if (knowledge == AdversaryKnowledge::full_group) {
                std::vector<std::vector<double>> known(config.num_servers);
                std::vector<double> gains(config.num_servers, 0.0);
                for (auto k : adv_group) {
                    known[k] = signals[k];
                    gains[k] = channel.g[k];
                }
                z = eavesdropper_cancel_group(wobs, known, gains);
            } else {
                std::size_t adv = adv_group.front();  // lowest index acts as adversary
                z = eavesdropper_cancel_own(wobs, signals[adv], channel.g[adv]);
            }

            std::vector<std::uint64_t> truth =
                answer_block_symbols(query, store, 0, target_group_id, pair.k);
            std::vector<std::uint64_t> guess =
                map_decode_coset(z, target_gain, config.power, sigma_w, pair, log_priors);
            if (guess == truth) ++w;
        }
        wins[chunk_id] = w;
    });

    std::uint64_t total = 0;
    for (auto w : wins) total += w;
    const double baseline = 1.0 / double(pair.num_cosets);
    Interval success = wilson_interval(total, config.trials);

    ExperimentReport rep;
    rep.experiment = "eavesdropper_advantage";
    rep.config_echo = to_json(config);
    rep.estimates.push_back({"map_success_rate", success, config.trials});
    rep.estimates.push_back({"map_advantage",
                             {success.value - baseline, success.lo - baseline,
                              success.hi - baseline},
                             config.trials});
    rep.estimates.push_back({"chance_level", {baseline, baseline, baseline}, 0});
    double adv = success.value - baseline;
    rep.checks.push_back({"map_advantage_below_0.05", adv < 0.05, adv, 0.05});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

ExperimentReport query_privacy_test(std::size_t num_messages, std::uint64_t trials,
                                    std::uint64_t seed) {
    Timer timer;
    if (num_messages == 0 || num_messages > 16)
        throw std::invalid_argument("privacy: pattern enumeration limited to 16 messages");
    if (trials == 0) throw std::invalid_argument("privacy: trials must be positive");
    const std::size_t bins = std::size_t(1) << num_messages;

    // Contingency tables: requested index x observed bit pattern.
    std::vector<std::uint64_t> table1(num_messages * bins, 0), table2(num_messages * bins, 0);
    Rng rng(derive_seed(seed, kTagTrial));
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::size_t index = 1 + std::size_t(rng.below(num_messages));
        QueryPair q = gen_query_pair(index, num_messages, rng);
        std::size_t pat1 = 0, pat2 = 0;
        for (std::size_t m = 0; m < num_messages; ++m) {
            pat1 |= std::size_t(q.q1[m] != 0) << m;
            pat2 |= std::size_t(q.q2[m] != 0) << m;
        }
        ++table1[(index - 1) * bins + pat1];
        ++table2[(index - 1) * bins + pat2];
    }
    std::vector<std::uint64_t> counts1(bins, 0), counts2(bins, 0);
    for (std::size_t i = 0; i < num_messages; ++i)
        for (std::size_t b = 0; b < bins; ++b) {
            counts1[b] += table1[i * bins + b];
            counts2[b] += table2[i * bins + b];
        }

    ExperimentReport rep;
    rep.experiment = "query_privacy";
    rep.config_echo = {{"num_messages", num_messages}, {"trials", trials}, {"master_seed", seed}};
    auto add_check = [&](const std::string& name, double p_value) {
        rep.checks.push_back({name, p_value > 0.01, p_value, 0.01});
    };
    add_check("q1_uniform_pvalue_above_0.01", chi_square_uniform(counts1).p_value);
    add_check("q2_uniform_pvalue_above_0.01", chi_square_uniform(counts2).p_value);
    if (num_messages >= 2) {
        add_check("q1_index_independence_pvalue_above_0.01",
                  chi_square_homogeneity(table1, num_messages, bins).p_value);
        add_check("q2_index_independence_pvalue_above_0.01",
                  chi_square_homogeneity(table2, num_messages, bins).p_value);
    }
    rep.runtime_seconds = timer.seconds();
    return rep;
}

ExperimentReport power_check(const ScenarioConfig& config) {
    Timer timer;
    config.validate();
    const NestedLatticePair pair = pair_from(config);
    Rng chan_rng(derive_seed(config.master_seed, kTagChannel));
    const ChannelRealization channel = channel_for_trial(config, chan_rng);
    const RoundPlan plan = plan_round(channel, config.power, config.mode_enum());
    const double sigma = std::sqrt(config.power);

    const std::size_t blocks = (std::size_t(config.trials) + pair.n - 1) / pair.n;
    const std::size_t num_chunks = (blocks + kChunk - 1) / kChunk;
    std::vector<Moments> acc1(num_chunks), acc2(num_chunks);

    parallel_chunks(blocks, kChunk, [&](std::size_t begin, std::size_t end) {
        const std::size_t chunk_id = begin / kChunk;
        Moments m1, m2;
        for (std::size_t blk = begin; blk < end; ++blk) {
            Rng rng(derive_seed(config.master_seed, kTagSymbols, blk));
            auto u1 = random_symbols(pair.k, pair.p, rng);
            auto u2 = random_symbols(pair.k, pair.p, rng);
            auto x1 = encode_and_sample(u1, sigma,
                                        derive_seed(config.master_seed, kTagDither1, blk), pair);
            auto x2 = encode_and_sample(u2, sigma,
                                        derive_seed(config.master_seed, kTagDither2, blk), pair);
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t j = 0; j < pair.n; ++j) {
                s1 += x1.x[j] * x1.x[j];
                double v = plan.partition.scale * x2.x[j];
                s2 += v * v;
            }
            m1.add(s1 / double(pair.n));
            m2.add(s2 / double(pair.n));
        }
        acc1[chunk_id] = m1;
        acc2[chunk_id] = m2;
    });

    Moments g1, g2;
    for (std::size_t c = 0; c < num_chunks; ++c) {
        g1.merge(acc1[c]);
        g2.merge(acc2[c]);
    }
    const double target1 = config.power;
    const double target2 = plan.partition.scale * plan.partition.scale * config.power;
    const std::uint64_t coords = std::uint64_t(blocks) * pair.n;

    ExperimentReport rep;
    rep.experiment = "power_check";
    rep.config_echo = to_json(config);
    rep.estimates.push_back({"group1_power", g1.mean_ci(), coords});
    rep.estimates.push_back({"group2_power", g2.mean_ci(), coords});
    rep.estimates.push_back({"group1_target", {target1, target1, target1}, 0});
    rep.estimates.push_back({"group2_target", {target2, target2, target2}, 0});
    double rel1 = std::abs(g1.mean() / target1 - 1.0);
    double rel2 = std::abs(g2.mean() / target2 - 1.0);
    rep.checks.push_back({"group1_power_within_5pct", rel1 <= 0.05, rel1, 0.05});
    rep.checks.push_back({"group2_power_within_5pct", rel2 <= 0.05, rel2, 0.05});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

std::vector<SweepRow> sweep_average_rate(std::size_t n_min, std::size_t n_max,
                                         const std::vector<double>& sigma_w2_list, double power,
                                         double sigma_y2, std::size_t draws, std::uint64_t seed) {
    if (n_min < 2 || n_min > n_max) throw std::invalid_argument("sweep: need 2 <= n_min <= n_max");
    if (n_max > 64) throw std::invalid_argument("sweep: server count limited to 64");
    if (sigma_w2_list.empty()) throw std::invalid_argument("sweep: need eavesdropper variances");
    for (double s : sigma_w2_list)
        if (!(s > 0.0)) throw std::invalid_argument("sweep: variances must be positive");
    if (!(power > 0.0) || !(sigma_y2 > 0.0))
        throw std::invalid_argument("sweep: power and sigma_y2 must be positive");
    if (draws == 0) throw std::invalid_argument("sweep: need at least one draw");

    const std::size_t num_n = n_max - n_min + 1;
    const std::size_t cells = num_n * sigma_w2_list.size();
    const std::size_t num_chunks = (draws + kChunk - 1) / kChunk;
    std::vector<std::vector<Moments>> acc(num_chunks, std::vector<Moments>(cells));

    parallel_chunks(draws, kChunk, [&](std::size_t begin, std::size_t end) {
        const std::size_t chunk_id = begin / kChunk;
        auto& local = acc[chunk_id];
        std::vector<double> h(n_max), g(n_max);
        for (std::size_t d = begin; d < end; ++d) {
            // Server gains shared across every (N, sigma_w2) cell of draw d.
            for (std::size_t k = 0; k < n_max; ++k) {
                Rng rng(derive_seed(seed, kTagGains, d, k));
                h[k] = rng.gaussian();
                g[k] = rng.gaussian();
            }
            for (std::size_t ni = 0; ni < num_n; ++ni) {
                const std::size_t N = n_min + ni;
                std::span<const double> hs(h.data(), N), gs(g.data(), N);
                for (std::size_t si = 0; si < sigma_w2_list.size(); ++si) {
                    const double sw2 = sigma_w2_list[si];
                    PartitionPlan plan =
                        N <= 12 ? optimize_partition_bruteforce(hs, gs, power, sigma_y2, sw2)
                                : optimize_partition_greedy(hs, gs, power, sigma_y2, sw2);
                    double rate = rate_theorem3(hs, gs, plan, power, sigma_y2, sw2).rate_nats;
                    local[ni * sigma_w2_list.size() + si].add(rate);
                }
            }
        }
    });

    std::vector<SweepRow> rows;
    rows.reserve(cells);
    for (std::size_t ni = 0; ni < num_n; ++ni) {
        for (std::size_t si = 0; si < sigma_w2_list.size(); ++si) {
            Moments m;
            for (std::size_t c = 0; c < num_chunks; ++c)
                m.merge(acc[c][ni * sigma_w2_list.size() + si]);
            Interval ci = m.mean_ci();
            rows.push_back({n_min + ni, sigma_w2_list[si], ci.value, ci.lo, ci.hi});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    std::vector<std::vector<double>> table;
    table.reserve(rows.size());
    for (const auto& r : rows)
        table.push_back({double(r.num_servers), r.sigma_w2, r.mean_rate, r.ci_lo, r.ci_hi});
    write_table_csv(os, {"N", "sigma_w2", "mean_rate_nats", "ci_lo", "ci_hi"}, table);
}

}  // namespace pirsim
