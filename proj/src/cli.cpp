#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pirsim/experiments.hpp"
#include "pirsim/serialize.hpp"

namespace pirsim {
namespace {

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

void emit_runtime(double seconds) { std::cerr << "runtime_seconds " << seconds << '\n'; }

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse number '" + cell + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
    std::vector<std::size_t> out;  // 1-based on the wire, 0-based internally
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        long long v = 0;
        try {
            v = std::stoll(cell);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse index '" + cell + "'");
        }
        if (v < 1) throw std::invalid_argument("server indices are 1-based");
        out.push_back(std::size_t(v) - 1);
    }
    if (out.empty()) throw std::invalid_argument("empty index list");
    return out;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        std::size_t v = std::stoull(text);
        return {v, v};
    }
    std::size_t lo = std::stoull(text.substr(0, dots));
    std::size_t hi = std::stoull(text.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument("range lower bound exceeds upper bound");
    return {lo, hi};
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    return scenario_from_json(j);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    out << text;
}

// First-trial audit artifacts: a transcript of the retrieval and a CSV trace
// of the block-0 air interface (per-server signals, user and eavesdropper
// observations, the residual after own-signal cancellation by the lowest
// opposite-group server).
void export_audit(const ScenarioConfig& config, const std::string& transcript_path,
                  const std::string& trace_path) {
    const NestedLatticePair pair = build_nested_pair(config.n, config.p, config.k, config.gamma);
    const MessageStore store =
        make_message_store(config.p, config.num_messages, config.message_length,
                           derive_seed(config.master_seed, 0x01));
    Rng rng(derive_seed(config.master_seed, 0x02, 0));
    std::size_t index = 1 + std::size_t(rng.below(config.num_messages));
    ChannelRealization channel =
        config.mode_enum() == Mode::fading
            ? draw_channel(config.num_servers, config.sigma_y2, config.sigma_w2, rng)
            : unit_channel(config.num_servers, config.sigma_y2, config.sigma_w2);

    RoundTranscript transcript;
    run_retrieval(store, index, channel, pair, config.power, config.mode_enum(),
                  derive_seed(config.master_seed, 0x03, 0), Optimizer::greedy, &transcript);
    if (!transcript_path.empty())
        write_text_file(transcript_path, to_json(transcript, config.num_servers).dump(2) + "\n");

    if (trace_path.empty()) return;
    const RoundPlan& plan = transcript.plan;
    std::vector<std::vector<double>> signals(config.num_servers);
    for (auto k : plan.partition.group1)
        signals[k] = server_respond(transcript.query, store, 0, plan, pair, 1, k);
    for (auto k : plan.partition.group2)
        signals[k] = server_respond(transcript.query, store, 0, plan, pair, 2, k);
    Rng ynoise(derive_seed(derive_seed(config.master_seed, 0x03, 0), 2, 0));
    std::vector<double> y = transmit_mac(signals, channel.h, channel.sigma_y2, ynoise);
    Rng wnoise(derive_seed(config.master_seed, 0x05, 0));
    std::vector<double> w = transmit_mac(signals, channel.g, channel.sigma_w2, wnoise);
    std::size_t adv = plan.partition.group2.front();
    std::vector<double> z = eavesdropper_cancel_own(w, signals[adv], channel.g[adv]);

    std::vector<std::string> header;
    for (std::size_t k = 0; k < config.num_servers; ++k)
        header.push_back("x_" + std::to_string(k + 1));
    header.insert(header.end(), {"y", "w", "z"});
    std::vector<std::vector<double>> rows(pair.n);
    for (std::size_t j = 0; j < pair.n; ++j) {
        for (std::size_t k = 0; k < config.num_servers; ++k)
            rows[j].push_back(signals[k].empty() ? 0.0 : signals[k][j]);
        rows[j].push_back(y[j]);
        rows[j].push_back(w[j]);
        rows[j].push_back(z[j]);
    }
    std::ostringstream os;
    write_table_csv(os, header, rows);
    write_text_file(trace_path, os.str());
}

int run_cli_inner(int argc, char** argv) {
    CLI::App app{"Lattice-coded private retrieval over a shared wireless channel"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    // rate
    auto* rate = app.add_subcommand("rate", "Closed-form achievable rate");
    int theorem = 1;
    double P = 1.0, sy2 = 1.0, sw2 = 1.0;
    std::size_t N = 2;
    std::string h_list, g_list, s1_list, s2_list;
    rate->add_option("--theorem", theorem, "1: two servers; 2: N servers; 3: fading")
        ->required()
        ->check(CLI::Range(1, 3));
    rate->add_option("--P", P, "per-server power")->required();
    rate->add_option("--sigma-y2", sy2, "user noise variance")->required();
    rate->add_option("--sigma-w2", sw2, "eavesdropper noise variance")->required();
    rate->add_option("--N", N, "server count (theorem 2)");
    rate->add_option("--h", h_list, "user-link gains, comma separated (theorem 3)");
    rate->add_option("--g", g_list, "eavesdropper-link gains, comma separated (theorem 3)");
    rate->add_option("--s1", s1_list, "group 1 server indices, 1-based (theorem 3)");
    rate->add_option("--s2", s2_list, "group 2 server indices, 1-based (theorem 3)");

    // partition
    auto* part = app.add_subcommand("partition", "Optimize the server grouping");
    std::string p_h, p_g, method = "both";
    double p_P = 1.0, p_sy2 = 1.0, p_sw2 = 1.0;
    part->add_option("--h", p_h, "user-link gains, comma separated")->required();
    part->add_option("--g", p_g, "eavesdropper-link gains, comma separated")->required();
    part->add_option("--P", p_P, "per-server power")->required();
    part->add_option("--sigma-y2", p_sy2, "user noise variance")->required();
    part->add_option("--sigma-w2", p_sw2, "eavesdropper noise variance")->required();
    part->add_option("--method", method, "greedy, brute or both")
        ->check(CLI::IsMember({"greedy", "brute", "both"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo retrieval error estimate");
    std::string sim_config, transcript_path, trace_path;
    std::uint64_t trials_override = 0, seed_override = 0;
    bool has_trials = false, has_seed = false;
    sim->add_option("--config", sim_config, "scenario JSON file")->required();
    sim->add_option("--trials", trials_override, "override config trials")
        ->each([&](const std::string&) { has_trials = true; });
    sim->add_option("--seed", seed_override, "override config master_seed")
        ->each([&](const std::string&) { has_seed = true; });
    sim->add_option("--transcript", transcript_path, "write first-trial transcript JSON here");
    sim->add_option("--trace", trace_path, "write first-trial block-0 signal CSV here");

    // privacy-test
    auto* priv = app.add_subcommand("privacy-test", "Query uniformity and eavesdropper advantage");
    std::size_t priv_M = 3;
    std::uint64_t priv_trials = 100000, priv_seed = 1;
    std::string priv_config;
    priv->add_option("--M", priv_M, "message count for the query test");
    priv->add_option("--trials", priv_trials, "query draws");
    priv->add_option("--seed", priv_seed, "seed for the query test");
    priv->add_option("--config", priv_config,
                     "scenario JSON; adds the MAP eavesdropper advantage estimate");

    // power-check
    auto* pow = app.add_subcommand("power-check", "Per-server transmit power");
    std::string pow_config;
    pow->add_option("--config", pow_config, "scenario JSON file")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Average optimized rate vs server count");
    std::string n_range = "2..16", sw_list, sw2_list, out_path;
    double sweep_P = 1.0, sweep_sy2 = 1.0;
    std::size_t sweep_draws = 200;
    std::uint64_t sweep_seed = 1;
    sweep->add_option("--n", n_range, "server count range, e.g. 2..16");
    sweep->add_option("--sigma-w", sw_list, "eavesdropper noise deviations, comma separated");
    sweep->add_option("--sigma-w2", sw2_list, "eavesdropper noise variances, comma separated");
    sweep->add_option("--P", sweep_P, "per-server power");
    sweep->add_option("--sigma-y2", sweep_sy2, "user noise variance");
    sweep->add_option("--draws", sweep_draws, "channel draws per cell");
    sweep->add_option("--seed", sweep_seed, "seed for the shared channel draws");
    sweep->add_option("--out", out_path, "CSV output path (default: CSV on stdout)");

    CLI11_PARSE(app, argc, argv);

    if (rate->parsed()) {
        nlohmann::json out;
        out["theorem"] = theorem;
        if (theorem == 1) {
            out["report"] = to_json(rate_theorem1(P, sy2, sw2));
        } else if (theorem == 2) {
            out["report"] = to_json(rate_theorem2(N, P, sy2, sw2));
        } else {
            if (h_list.empty() || g_list.empty())
                throw std::invalid_argument("theorem 3 needs --h and --g");
            std::vector<double> h = parse_double_list(h_list);
            std::vector<double> g = parse_double_list(g_list);
            PartitionPlan plan;
            if (!s1_list.empty() || !s2_list.empty()) {
                if (s1_list.empty() || s2_list.empty())
                    throw std::invalid_argument("need both --s1 and --s2");
                plan = make_partition(h, g, parse_index_list(s1_list), parse_index_list(s2_list));
            } else {
                plan = optimize_partition_greedy(h, g, P, sy2, sw2);
            }
            out["partition"] = to_json(plan);
            out["report"] = to_json(rate_theorem3(h, g, plan, P, sy2, sw2));
        }
        emit(out);
        return 0;
    }

    if (part->parsed()) {
        std::vector<double> h = parse_double_list(p_h);
        std::vector<double> g = parse_double_list(p_g);
        nlohmann::json out;
        if (method != "brute") {
            PartitionPlan plan = optimize_partition_greedy(h, g, p_P, p_sy2, p_sw2);
            out["greedy"] = {{"plan", to_json(plan)},
                             {"report", to_json(rate_theorem3(h, g, plan, p_P, p_sy2, p_sw2))}};
        }
        if (method != "greedy") {
            if (h.size() > 14 && method == "both") {
                // brute force unavailable above 14 servers; greedy result stands alone
            } else {
                PartitionPlan plan = optimize_partition_bruteforce(h, g, p_P, p_sy2, p_sw2);
                out["brute_force"] = {
                    {"plan", to_json(plan)},
                    {"report", to_json(rate_theorem3(h, g, plan, p_P, p_sy2, p_sw2))}};
            }
        }
        emit(out);
        return 0;
    }

    if (sim->parsed()) {
        ScenarioConfig config = load_config(sim_config);
        if (has_trials) config.trials = trials_override;
        if (has_seed) config.master_seed = seed_override;
        config.validate();
        ExperimentReport rep = estimate_error_prob(config);
        if (!transcript_path.empty() || !trace_path.empty())
            export_audit(config, transcript_path, trace_path);
        emit(rep.to_json());
        emit_runtime(rep.runtime_seconds);
        return 0;
    }

    if (priv->parsed()) {
        nlohmann::json out;
        ExperimentReport q = query_privacy_test(priv_M, priv_trials, priv_seed);
        out["query_privacy"] = q.to_json();
        double runtime = q.runtime_seconds;
        if (!priv_config.empty()) {
            ExperimentReport e = estimate_eavesdropper_advantage(load_config(priv_config));
            out["eavesdropper"] = e.to_json();
            runtime += e.runtime_seconds;
        }
        emit(out);
        emit_runtime(runtime);
        return 0;
    }

    if (pow->parsed()) {
        ExperimentReport rep = power_check(load_config(pow_config));
        emit(rep.to_json());
        emit_runtime(rep.runtime_seconds);
        return 0;
    }

    if (sweep->parsed()) {
        auto [n_lo, n_hi] = parse_range(n_range);
        std::vector<double> sw2;
        if (!sw2_list.empty()) {
            if (!sw_list.empty())
                throw std::invalid_argument("give either --sigma-w or --sigma-w2, not both");
            sw2 = parse_double_list(sw2_list);
        } else {
            std::vector<double> sw =
                sw_list.empty() ? std::vector<double>{0.5, 1.0, 2.0} : parse_double_list(sw_list);
            for (double s : sw) sw2.push_back(s * s);
        }
        auto rows = sweep_average_rate(n_lo, n_hi, sw2, sweep_P, sweep_sy2, sweep_draws,
                                       sweep_seed);
        std::ostringstream os;
        write_sweep_csv(os, rows);
        if (out_path.empty()) {
            std::cout << os.str();
        } else {
            write_text_file(out_path, os.str());
            emit({{"path", out_path}, {"rows", rows.size()}});
        }
        return 0;
    }

    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    try {
        return run_cli_inner(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace pirsim
