#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pirsim/lattice.hpp"

namespace pirsim {

// Grouping of servers into two simultaneously transmitting sets; remaining
// servers stay idle. Aggregates follow the convention h_tilde = sum |h_k| and
// g_tilde = sum g_k over the group, relabeled so h_tilde1 <= h_tilde2; the
// stronger group scales its transmission by scale = h_tilde1/h_tilde2 and
// every server negates its signal when its own h is negative (sign_flips).
struct PartitionPlan {
    std::vector<std::size_t> group1;  // 0-based server indices, sorted
    std::vector<std::size_t> group2;
    double h_tilde1 = 0.0;
    double h_tilde2 = 0.0;
    double g_tilde1 = 0.0;
    double g_tilde2 = 0.0;
    double scale = 1.0;  // in (0, 1]
    std::vector<double> sign_flips;  // per server, +1 or -1; idle servers +1
};

// Validates groups (non-empty, disjoint, in range), computes aggregates from
// the raw gains and applies the relabeling above.
PartitionPlan make_partition(std::span<const double> h, std::span<const double> g,
                             std::vector<std::size_t> group1, std::vector<std::size_t> group2);

enum class Branch { eavesdropper1, eavesdropper2, self_noise };

// All rates in nats per channel use, clamped at zero.
struct RateReport {
    double rate_nats = 0.0;
    Branch binding_branch = Branch::self_noise;
    double snr_y = 0.0;
    double snr_w1 = 0.0;  // theorems with one eavesdropper branch mirror it here
    double snr_w2 = 0.0;
    double alpha_opt = 0.0;  // MMSE scaling the achieving scheme would use
    bool feasible = false;   // rate strictly positive
    double rate_bits() const;
};

// Two servers, unit gains:
//   R = max(0, 1/2 ln min{(1/2+SNR_y)/(1+SNR_w), SNR_y(1/2+SNR_y)/(1+SNR_y)} - 1/2).
RateReport rate_theorem1(double power, double sigma_y2, double sigma_w2);

// N servers, unit gains, two groups of floor(N/2): the two-server expression
// evaluated at SNR' = floor(N/2)^2 P / sigma^2 for both links.
RateReport rate_theorem2(std::size_t num_servers, double power, double sigma_y2, double sigma_w2);

// Fading gains with an explicit partition. Effective SNRs:
//   SNR_y = h1~^2 P / sigma_y2,  SNR_w1 = g1~^2 P / sigma_w2,
//   SNR_w2 = (g2~ h1~ / h2~)^2 P / sigma_w2,
// with aggregates recomputed from (h, g) and relabeled so h1~ <= h2~. The
// minimum runs over both eavesdropper branches and the self-noise branch.
RateReport rate_theorem3(std::span<const double> h, std::span<const double> g,
                         const PartitionPlan& partition, double power, double sigma_y2,
                         double sigma_w2);

// 1/2 ln(1 + P_total / sigma2): single-antenna link with the pooled power.
double upper_bound_awgn(double power_total, double sigma2);

// Minimizer of the equivalent-noise variance (1-a)^2 * 2P + a^2 sigma_eff2.
struct MmseScaling {
    double alpha = 0.0;
    double sigma_tilde2 = 0.0;  // variance at the minimizer: 2P sigma^2/(2P + sigma^2)
};
MmseScaling alpha_opt(double power, double sigma_eff2);

// Eavesdropper-side equivalent noise width sqrt(P)*s / sqrt(P^2 + s^2) where
// s is the effective eavesdropper noise deviation for the branch.
double sigma_tilde_w(double power, double sigma_w_eff);

// Volume-to-noise checks for a concrete pair at the working point. The fine
// condition supports reliable quantization, the coarse condition supports the
// masking argument; both are asymptotic requirements reported as-is for the
// finite dimension at hand.
struct GoodnessReport {
    double vnr_fine = 0.0;       // V(fine)^(2/n) / sigma_tilde_y^2, want > 2*pi*e
    double vnr_coarse = 0.0;     // V(coarse)^(2/n) / sigma_tilde_w^2, want < 2*pi
    bool awgn_good = false;
    bool secrecy_good = false;
    bool power_cond1 = false;    // V(coarse)^(2/n) < 2*pi*P/(pi-1)
    bool power_cond2 = false;    // V(coarse)^(2/n) < 2*pi*P/(1 + 1/rho_b), rho_b = P/sigma_tilde_y^2 - 1/2
};
GoodnessReport check_design_conditions(const NestedLatticePair& pair, double sigma_tilde_y2,
                                       double sigma_tilde_w2, double power);

// Exhaustive argmax of the theorem-3 rate over all two-group partitions
// (idle servers allowed). Ties on the clamped rate resolve to the
// lexicographically smallest (group1, group2) in enumeration order, before
// relabeling. Guard: num_servers <= 14.
PartitionPlan optimize_partition_bruteforce(std::span<const double> h, std::span<const double> g,
                                            double power, double sigma_y2, double sigma_w2);

// Balanced-|h| seed assignment followed by first-improvement local search
// over single moves (including idling) and cross-group swaps. Never exceeds
// the brute-force rate; cost polynomial in num_servers.
PartitionPlan optimize_partition_greedy(std::span<const double> h, std::span<const double> g,
                                        double power, double sigma_y2, double sigma_w2);

}  // namespace pirsim
