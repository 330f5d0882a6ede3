#include "pirsim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pirsim/rng.hpp"

namespace pirsim {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kE = 2.718281828459045235360287471352662498;

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("rates: ") + what + " must be positive and finite");
    }
}

// Branch values inside the log of the rate expression; min over them decides
// the rate. Order of labels: eavesdropper1, eavesdropper2, self_noise.
struct Branches {
    double b1, b2, bs;
    double min_value() const { return std::min(std::min(b1, b2), bs); }
    Branch argmin() const {
        double m = min_value();
        if (b1 == m) return Branch::eavesdropper1;
        if (b2 == m) return Branch::eavesdropper2;
        return Branch::self_noise;
    }
};

Branches make_branches(double snr_y, double snr_w1, double snr_w2) {
    Branches br;
    br.b1 = (0.5 + snr_y) / (1.0 + snr_w1);
    br.b2 = (0.5 + snr_y) / (1.0 + snr_w2);
    br.bs = snr_y * (0.5 + snr_y) / (1.0 + snr_y);
    return br;
}

RateReport report_from_branches(const Branches& br, double snr_y, double snr_w1, double snr_w2,
                                double alpha) {
    RateReport r;
    r.snr_y = snr_y;
    r.snr_w1 = snr_w1;
    r.snr_w2 = snr_w2;
    r.alpha_opt = alpha;
    r.binding_branch = br.argmin();
    double raw = 0.5 * std::log(br.min_value()) - 0.5;
    r.rate_nats = std::max(0.0, raw);
    r.feasible = r.rate_nats > 0.0;
    return r;
}

// Clamped-rate comparison key without evaluating logs: rate > 0 iff the
// branch minimum exceeds e, and all sub-e minima tie at rate zero.
double rate_key(double min_branch) { return std::max(min_branch, kE); }

struct Aggregates {
    double h1, h2, g1, g2;  // relabeled so h1 <= h2
};

Aggregates aggregates_for(std::span<const double> h, std::span<const double> g,
                          const std::vector<std::size_t>& s1, const std::vector<std::size_t>& s2) {
    Aggregates a{0.0, 0.0, 0.0, 0.0};
    for (auto k : s1) {
        a.h1 += std::abs(h[k]);
        a.g1 += g[k];
    }
    for (auto k : s2) {
        a.h2 += std::abs(h[k]);
        a.g2 += g[k];
    }
    if (a.h1 > a.h2) {
        std::swap(a.h1, a.h2);
        std::swap(a.g1, a.g2);
    }
    return a;
}

Branches branches_for(const Aggregates& a, double power, double sigma_y2, double sigma_w2) {
    double snr_y = a.h1 * a.h1 * power / sigma_y2;
    double snr_w1 = a.g1 * a.g1 * power / sigma_w2;
    double gw2 = a.g2 * a.h1 / a.h2;
    double snr_w2 = gw2 * gw2 * power / sigma_w2;
    return make_branches(snr_y, snr_w1, snr_w2);
}

void validate_groups(std::size_t num_servers, const std::vector<std::size_t>& s1,
                     const std::vector<std::size_t>& s2) {
    if (s1.empty() || s2.empty())
        throw std::invalid_argument("partition: both groups must be non-empty");
    std::vector<char> seen(num_servers, 0);
    for (const auto* grp : {&s1, &s2}) {
        for (auto k : *grp) {
            if (k >= num_servers) throw std::invalid_argument("partition: server index out of range");
            if (seen[k]) throw std::invalid_argument("partition: groups must be disjoint");
            seen[k] = 1;
        }
    }
}

}  // namespace

double RateReport::rate_bits() const { return rate_nats / std::log(2.0); }

PartitionPlan make_partition(std::span<const double> h, std::span<const double> g,
                             std::vector<std::size_t> group1, std::vector<std::size_t> group2) {
    if (h.size() != g.size() || h.size() < 2)
        throw std::invalid_argument("partition: need matching gain vectors for >= 2 servers");
    validate_groups(h.size(), group1, group2);
    std::sort(group1.begin(), group1.end());
    std::sort(group2.begin(), group2.end());

    PartitionPlan plan;
    plan.group1 = std::move(group1);
    plan.group2 = std::move(group2);
    for (auto k : plan.group1) {
        plan.h_tilde1 += std::abs(h[k]);
        plan.g_tilde1 += g[k];
    }
    for (auto k : plan.group2) {
        plan.h_tilde2 += std::abs(h[k]);
        plan.g_tilde2 += g[k];
    }
    if (plan.h_tilde1 > plan.h_tilde2) {
        std::swap(plan.group1, plan.group2);
        std::swap(plan.h_tilde1, plan.h_tilde2);
        std::swap(plan.g_tilde1, plan.g_tilde2);
    }
    if (!(plan.h_tilde2 > 0.0))
        throw std::invalid_argument("partition: aggregate user-link gain must be positive");
    if (!(plan.h_tilde1 > 0.0))
        throw std::invalid_argument("partition: each group needs a nonzero user-link gain");
    plan.scale = plan.h_tilde1 / plan.h_tilde2;
    plan.sign_flips.resize(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) plan.sign_flips[k] = h[k] < 0.0 ? -1.0 : 1.0;
    return plan;
}

RateReport rate_theorem1(double power, double sigma_y2, double sigma_w2) {
    check_positive(power, "power");
    check_positive(sigma_y2, "sigma_y2");
    check_positive(sigma_w2, "sigma_w2");
    double snr_y = power / sigma_y2;
    double snr_w = power / sigma_w2;
    return report_from_branches(make_branches(snr_y, snr_w, snr_w), snr_y, snr_w, snr_w,
                                alpha_opt(power, sigma_y2).alpha);
}

RateReport rate_theorem2(std::size_t num_servers, double power, double sigma_y2, double sigma_w2) {
    if (num_servers < 2) throw std::invalid_argument("rates: need at least two servers");
    check_positive(power, "power");
    check_positive(sigma_y2, "sigma_y2");
    check_positive(sigma_w2, "sigma_w2");
    double m = double(num_servers / 2);  // group size; one server idles when N is odd
    double snr_y = m * m * power / sigma_y2;
    double snr_w = m * m * power / sigma_w2;
    return report_from_branches(make_branches(snr_y, snr_w, snr_w), snr_y, snr_w, snr_w,
                                alpha_opt(power, sigma_y2 / (m * m)).alpha);
}

RateReport rate_theorem3(std::span<const double> h, std::span<const double> g,
                         const PartitionPlan& partition, double power, double sigma_y2,
                         double sigma_w2) {
    if (h.size() != g.size() || h.size() < 2)
        throw std::invalid_argument("rates: need matching gain vectors for >= 2 servers");
    check_positive(power, "power");
    check_positive(sigma_y2, "sigma_y2");
    check_positive(sigma_w2, "sigma_w2");
    validate_groups(h.size(), partition.group1, partition.group2);
    Aggregates a = aggregates_for(h, g, partition.group1, partition.group2);
    if (!(a.h1 > 0.0))
        throw std::invalid_argument("rates: each group needs a nonzero user-link gain");
    Branches br = branches_for(a, power, sigma_y2, sigma_w2);
    double gw2 = a.g2 * a.h1 / a.h2;
    return report_from_branches(br, a.h1 * a.h1 * power / sigma_y2,
                                a.g1 * a.g1 * power / sigma_w2, gw2 * gw2 * power / sigma_w2,
                                alpha_opt(power, sigma_y2 / (a.h1 * a.h1)).alpha);
}

double upper_bound_awgn(double power_total, double sigma2) {
    check_positive(sigma2, "sigma2");
    if (power_total < 0.0 || !std::isfinite(power_total))
        throw std::invalid_argument("rates: total power must be nonnegative and finite");
    return 0.5 * std::log1p(power_total / sigma2);
}

MmseScaling alpha_opt(double power, double sigma_eff2) {
    check_positive(power, "power");
    check_positive(sigma_eff2, "sigma_eff2");
    MmseScaling s;
    s.alpha = 2.0 * power / (2.0 * power + sigma_eff2);
    s.sigma_tilde2 = 2.0 * power * sigma_eff2 / (2.0 * power + sigma_eff2);
    return s;
}

double sigma_tilde_w(double power, double sigma_w_eff) {
    check_positive(power, "power");
    check_positive(sigma_w_eff, "sigma_w_eff");
    return std::sqrt(power) * sigma_w_eff / std::sqrt(power * power + sigma_w_eff * sigma_w_eff);
}

GoodnessReport check_design_conditions(const NestedLatticePair& pair, double sigma_tilde_y2,
                                       double sigma_tilde_w2, double power) {
    check_positive(sigma_tilde_y2, "sigma_tilde_y2");
    check_positive(sigma_tilde_w2, "sigma_tilde_w2");
    check_positive(power, "power");
    GoodnessReport rep;
    rep.vnr_fine = pair.fine_volume_pow() / sigma_tilde_y2;
    rep.vnr_coarse = pair.coarse_volume_pow() / sigma_tilde_w2;
    rep.awgn_good = rep.vnr_fine > 2.0 * kPi * kE;
    rep.secrecy_good = rep.vnr_coarse < 2.0 * kPi;
    rep.power_cond1 = pair.coarse_volume_pow() < 2.0 * kPi * power / (kPi - 1.0);
    double rho_b = power / sigma_tilde_y2 - 0.5;
    rep.power_cond2 =
        rho_b > 0.0 && pair.coarse_volume_pow() < 2.0 * kPi * power / (1.0 + 1.0 / rho_b);
    return rep;
}

PartitionPlan optimize_partition_bruteforce(std::span<const double> h, std::span<const double> g,
                                            double power, double sigma_y2, double sigma_w2) {
    const std::size_t n = h.size();
    if (h.size() != g.size() || n < 2)
        throw std::invalid_argument("partition: need matching gain vectors for >= 2 servers");
    if (n > 14) throw std::invalid_argument("partition: exhaustive search limited to 14 servers");
    check_positive(power, "power");
    check_positive(sigma_y2, "sigma_y2");
    check_positive(sigma_w2, "sigma_w2");

    // DFS over per-server assignment in {group1, group2, idle} with running
    // aggregate sums; candidate value is the clamped-rate key.
    std::vector<int> assign(n, -1);
    std::vector<int> best_assign;
    double best_key = -1.0;
    std::vector<std::size_t> s1, s2, c1, c2;

    auto extract = [&](const std::vector<int>& a, std::vector<std::size_t>& g1,
                       std::vector<std::size_t>& g2) {
        g1.clear();
        g2.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (a[k] == 0) g1.push_back(k);
            else if (a[k] == 1) g2.push_back(k);
        }
    };

    auto dfs = [&](auto&& self, std::size_t idx, double h1, double h2, double g1, double g2,
                   std::size_t n1, std::size_t n2) -> void {
        if (idx == n) {
            if (n1 == 0 || n2 == 0) return;
            double lo = std::min(h1, h2);
            if (!(lo > 0.0)) return;  // a group with zero user-link gain cannot transmit
            Aggregates a{h1, h2, g1, g2};
            if (a.h1 > a.h2) {
                std::swap(a.h1, a.h2);
                std::swap(a.g1, a.g2);
            }
            double key = rate_key(branches_for(a, power, sigma_y2, sigma_w2).min_value());
            if (key < best_key) return;
            if (key == best_key) {
                extract(assign, c1, c2);
                extract(best_assign, s1, s2);
                if (!(c1 < s1 || (c1 == s1 && c2 < s2))) return;
            }
            best_key = key;
            best_assign = assign;
            return;
        }
        assign[idx] = 0;
        self(self, idx + 1, h1 + std::abs(h[idx]), h2, g1 + g[idx], g2, n1 + 1, n2);
        assign[idx] = 1;
        self(self, idx + 1, h1, h2 + std::abs(h[idx]), g1, g2 + g[idx], n1, n2 + 1);
        assign[idx] = 2;
        self(self, idx + 1, h1, h2, g1, g2, n1, n2);
        assign[idx] = -1;
    };
    dfs(dfs, 0, 0.0, 0.0, 0.0, 0.0, 0, 0);

    if (best_assign.empty())
        throw std::invalid_argument("partition: no feasible two-group split exists");
    extract(best_assign, s1, s2);
    return make_partition(h, g, s1, s2);
}

PartitionPlan optimize_partition_greedy(std::span<const double> h, std::span<const double> g,
                                        double power, double sigma_y2, double sigma_w2) {
    const std::size_t n = h.size();
    if (h.size() != g.size() || n < 2)
        throw std::invalid_argument("partition: need matching gain vectors for >= 2 servers");
    check_positive(power, "power");
    check_positive(sigma_y2, "sigma_y2");
    check_positive(sigma_w2, "sigma_w2");

    auto key_of = [&](const std::vector<int>& a) -> double {
        double h1 = 0.0, h2 = 0.0, g1 = 0.0, g2 = 0.0;
        std::size_t n1 = 0, n2 = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (a[k] == 0) {
                h1 += std::abs(h[k]);
                g1 += g[k];
                ++n1;
            } else if (a[k] == 1) {
                h2 += std::abs(h[k]);
                g2 += g[k];
                ++n2;
            }
        }
        if (n1 == 0 || n2 == 0) return -1.0;
        if (!(std::min(h1, h2) > 0.0)) return -1.0;
        Aggregates agg{h1, h2, g1, g2};
        if (agg.h1 > agg.h2) {
            std::swap(agg.h1, agg.h2);
            std::swap(agg.g1, agg.g2);
        }
        return rate_key(branches_for(agg, power, sigma_y2, sigma_w2).min_value());
    };

    // Steepest-ascent local search over single reassignments (either group or
    // idle) and cross-group swaps. The key strictly increases with every
    // applied move, so the walk terminates.
    auto local_search = [&](std::vector<int>& assign) -> double {
        double current = key_of(assign);
        for (;;) {
            double best = current;
            std::size_t mk = 0, ma = 0, mb = 0;
            int mt = 0;
            bool swap_move = false, found = false;
            for (std::size_t k = 0; k < n; ++k) {
                int old = assign[k];
                for (int target = 0; target < 3; ++target) {
                    if (target == old) continue;
                    assign[k] = target;
                    double cand = key_of(assign);
                    if (cand > best) {
                        best = cand;
                        mk = k;
                        mt = target;
                        swap_move = false;
                        found = true;
                    }
                }
                assign[k] = old;
            }
            for (std::size_t a = 0; a < n; ++a) {
                if (assign[a] != 0) continue;
                for (std::size_t b = 0; b < n; ++b) {
                    if (assign[b] != 1) continue;
                    assign[a] = 1;
                    assign[b] = 0;
                    double cand = key_of(assign);
                    if (cand > best) {
                        best = cand;
                        ma = a;
                        mb = b;
                        swap_move = true;
                        found = true;
                    }
                    assign[a] = 0;
                    assign[b] = 1;
                }
            }
            if (!found) return current;
            if (swap_move) {
                assign[ma] = 1;
                assign[mb] = 0;
            } else {
                assign[mk] = mt;
            }
            current = best;
        }
    };

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ha = std::abs(h[a]), hb = std::abs(h[b]);
        return ha != hb ? ha > hb : a < b;
    });

    std::vector<std::vector<int>> seeds;
    // Seed: strongest |h| first, each server to the currently weaker group.
    {
        std::vector<int> assign(n, 2);
        double sum1 = 0.0, sum2 = 0.0;
        for (auto k : order) {
            if (sum1 <= sum2) {
                assign[k] = 0;
                sum1 += std::abs(h[k]);
            } else {
                assign[k] = 1;
                sum2 += std::abs(h[k]);
            }
        }
        seeds.push_back(std::move(assign));
    }
    // Seed: drive both signed eavesdropper aggregates toward zero, breaking
    // ties toward the h-weaker group.
    {
        std::vector<int> assign(n, 2);
        double gs1 = 0.0, gs2 = 0.0, hs1 = 0.0, hs2 = 0.0;
        std::vector<std::size_t> gorder = order;
        std::sort(gorder.begin(), gorder.end(), [&](std::size_t a, std::size_t b) {
            double ga = std::abs(g[a]), gb = std::abs(g[b]);
            return ga != gb ? ga > gb : a < b;
        });
        for (auto k : gorder) {
            double c1 = std::abs(gs1 + g[k]), c2 = std::abs(gs2 + g[k]);
            bool to_first = c1 != c2 ? c1 < c2 : hs1 <= hs2;
            if (to_first) {
                assign[k] = 0;
                gs1 += g[k];
                hs1 += std::abs(h[k]);
            } else {
                assign[k] = 1;
                gs2 += g[k];
                hs2 += std::abs(h[k]);
            }
        }
        seeds.push_back(std::move(assign));
    }
    // Seed: alternate down the |h| ranking.
    {
        std::vector<int> assign(n, 2);
        for (std::size_t r = 0; r < n; ++r) assign[order[r]] = int(r % 2);
        seeds.push_back(std::move(assign));
    }
    // Deterministic restarts; infeasible starts score -1 and the search
    // climbs out through the single-move neighborhood.
    for (std::uint64_t r = 0; r < 8; ++r) {
        Rng rng(derive_seed(0x9E37C9, n, r));
        std::vector<int> assign(n);
        for (std::size_t k = 0; k < n; ++k) assign[k] = int(rng.below(3));
        seeds.push_back(std::move(assign));
    }

    double best_key = -1.0;
    std::vector<int> best_assign;
    for (auto& seed : seeds) {
        double key = local_search(seed);
        if (key > best_key) {
            best_key = key;
            best_assign = seed;
        }
    }
    if (best_key < 0.0)
        throw std::invalid_argument("partition: no feasible two-group split exists");

    // Iterated local search: kick the incumbent with a few random
    // reassignments, re-descend, keep strict improvements.
    Rng kick(derive_seed(0x51AC7, n));
    for (int round = 0; round < 16; ++round) {
        std::vector<int> cand = best_assign;
        std::size_t kicks = 2 + kick.below(3);
        for (std::size_t j = 0; j < kicks; ++j) cand[kick.below(n)] = int(kick.below(3));
        double key = local_search(cand);
        if (key > best_key) {
            best_key = key;
            best_assign = cand;
        }
    }

    std::vector<std::size_t> s1, s2;
    for (std::size_t k = 0; k < n; ++k) {
        if (best_assign[k] == 0) s1.push_back(k);
        else if (best_assign[k] == 1) s2.push_back(k);
    }
    return make_partition(h, g, s1, s2);
}

}  // namespace pirsim
