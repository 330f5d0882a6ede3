#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pirsim/protocol.hpp"
#include "pirsim/stats.hpp"

namespace pirsim {

enum class AdversaryKnowledge {
    own_signal,  // cancels only its own transmission before decoding
    full_group,  // cancels its whole group's transmissions
};

// One experiment's parameters; JSON keys equal the field names.
struct ScenarioConfig {
    std::size_t num_servers = 2;
    std::size_t num_messages = 4;
    std::size_t message_length = 16;
    std::uint64_t p = 5;
    std::size_t k = 1;
    std::size_t n = 8;
    double gamma = 0.2;
    double power = 1.0;
    double sigma_y2 = 0.004;
    double sigma_w2 = 1.0;
    std::string mode = "non_fading";
    std::uint64_t trials = 1000;
    std::uint64_t master_seed = 1;
    std::string adversary_knowledge = "full_group";

    Mode mode_enum() const;
    AdversaryKnowledge knowledge_enum() const;
    void validate() const;  // throws std::invalid_argument on any bad field
};

nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig scenario_from_json(const nlohmann::json& j);

struct NamedEstimate {
    std::string name;
    Interval interval;
    std::uint64_t trials = 0;
};

struct CheckOutcome {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double threshold = 0.0;  // pass bound; direction recorded in the name
};

// Uniform result shape for all estimators: config echo, estimates with 95%
// intervals and their trial counts, declared-tolerance checks. runtime stays
// out of the serialized payload so output bytes depend only on inputs.
struct ExperimentReport {
    std::string experiment;
    nlohmann::json config_echo;
    std::vector<NamedEstimate> estimates;
    std::vector<CheckOutcome> checks;
    double runtime_seconds = 0.0;

    nlohmann::json to_json() const;  // excludes runtime_seconds
    const NamedEstimate& estimate(const std::string& name) const;
    const CheckOutcome& check(const std::string& name) const;
    bool all_checks_passed() const;
};

// Message and symbol error rates of full retrievals. Per trial: uniform
// message index, fresh channel in fading mode, full round trip. Declared
// check: symbol error rate below 1e-3.
ExperimentReport estimate_error_prob(const ScenarioConfig& config);

// Empirical variance of the post-combining equivalent noise
// (alpha - 1)(x1 + x2) + alpha * combined noise against the closed form
// 2 P sigma_eff^2 / (2 P + sigma_eff^2); declared tolerance 3% relative.
ExperimentReport measure_equivalent_noise(const ScenarioConfig& config);

// Log of the per-coordinate transmit-weight normalizer for every coset;
// input to the MAP decoder, computable once per (pair, power).
std::vector<double> map_log_priors(const NestedLatticePair& pair, double power);

// Exact MAP coset decision for z = gain * x + noise, x drawn from the
// discrete Gaussian of width sqrt(power) on an unknown coset, noise of
// deviation sigma_w. Likelihoods sum lattice weights within 12 posterior
// deviations; ties resolve to the smallest coset index. sigma_w = 0 is the
// noiseless limit.
std::vector<std::uint64_t> map_decode_coset(std::span<const double> z, double gain, double power,
                                            double sigma_w, const NestedLatticePair& pair,
                                            const std::vector<double>& log_priors);

// Success rate of the MAP coset decoder run on the adversary residual, minus
// the 1/p^k guessing baseline. Per trial the adversary joins the group whose
// opposite aggregate gain at its antenna is largest (the worst case for
// privacy), cancels what its knowledge level allows, and decodes the other
// group's coset. It never sees the mask b or the index. Declared check:
// advantage below 0.05. Guard: p^k <= 1e4.
ExperimentReport estimate_eavesdropper_advantage(const ScenarioConfig& config);

// Chi-square uniformity of each query vector over its 2^M patterns plus
// homogeneity across requested indices, for both query roles. Declared
// check: all p-values above 0.01. Guard: num_messages <= 16.
ExperimentReport query_privacy_test(std::size_t num_messages, std::uint64_t trials,
                                    std::uint64_t seed);

// Per-server empirical transmit power (1/n) E||x_k||^2 against the target:
// P for group 1, scale^2 P for group 2. trials counts coordinate samples per
// server. Declared tolerance 5% relative.
ExperimentReport power_check(const ScenarioConfig& config);

struct SweepRow {
    std::size_t num_servers = 0;
    double sigma_w2 = 0.0;
    double mean_rate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// Average optimized fading rate per (N, sigma_w2) cell over shared channel
// draws: gains for draw d, server k are identical across every cell, so
// adding servers or weakening the eavesdropper acts on paired samples.
// Exhaustive partition search up to 12 servers, greedy beyond.
std::vector<SweepRow> sweep_average_rate(std::size_t n_min, std::size_t n_max,
                                         const std::vector<double>& sigma_w2_list, double power,
                                         double sigma_y2, std::size_t draws, std::uint64_t seed);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Entry point used by the command-line tool; returns the process exit code
// (0 ok, 1 invalid arguments, 2 runtime failure).
int run_cli(int argc, char** argv);

}  // namespace pirsim
