#include "pirsim/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pirsim {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("stats: need at least one trial");
    if (successes > trials) throw std::invalid_argument("stats: successes exceed trials");
    const double n = double(trials);
    const double phat = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // analytically lo <= phat <= hi; the clamps also absorb rounding residue at phat in {0, 1}
    return {phat, std::clamp(center - half, 0.0, phat), std::clamp(center + half, phat, 1.0)};
}

double sample_mean(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("stats: empty sample");
    double s = 0.0;
    for (double v : samples) s += v;
    return s / double(samples.size());
}

double sample_variance(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("stats: need two samples for a variance");
    double m = sample_mean(samples);
    double s = 0.0;
    for (double v : samples) s += (v - m) * (v - m);
    return s / double(samples.size() - 1);
}

Interval mean_interval(std::span<const double> samples, double z) {
    double m = sample_mean(samples);
    if (samples.size() == 1) return {m, m, m};
    double sd = std::sqrt(sample_variance(samples) / double(samples.size()));
    return {m, m - z * sd, m + z * sd};
}

double Moments::mean() const {
    if (count == 0) throw std::invalid_argument("stats: empty accumulator");
    return sum / double(count);
}

double Moments::variance() const {
    if (count < 2) throw std::invalid_argument("stats: need two samples for a variance");
    double m = mean();
    double v = (sum_sq - double(count) * m * m) / double(count - 1);
    return v > 0.0 ? v : 0.0;
}

Interval Moments::mean_ci(double z) const {
    double m = mean();
    if (count == 1) return {m, m, m};
    double sd = std::sqrt(variance() / double(count));
    return {m, m - z * sd, m + z * sd};
}

namespace {

double chi_square_survival(double stat, std::size_t dof) {
    if (dof == 0) return 1.0;
    return boost::math::gamma_q(double(dof) / 2.0, stat / 2.0);
}

}  // namespace

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw std::invalid_argument("stats: need at least two cells");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("stats: empty histogram");
    const double expected = double(total) / double(counts.size());
    ChiSquareResult r;
    for (auto c : counts) {
        double d = double(c) - expected;
        r.statistic += d * d / expected;
    }
    r.dof = counts.size() - 1;
    r.p_value = chi_square_survival(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> table, std::size_t rows,
                                       std::size_t cols) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("stats: table needs 2x2 or more");
    if (table.size() != rows * cols) throw std::invalid_argument("stats: table shape mismatch");
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double v = double(table[r * cols + c]);
            row_sum[r] += v;
            col_sum[c] += v;
            total += v;
        }
    if (total == 0.0) throw std::invalid_argument("stats: empty table");
    ChiSquareResult res;
    std::size_t used_cols = 0;
    for (std::size_t c = 0; c < cols; ++c)
        if (col_sum[c] > 0.0) ++used_cols;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_sum[c] == 0.0 || row_sum[r] == 0.0) continue;
            double expected = row_sum[r] * col_sum[c] / total;
            double d = double(table[r * cols + c]) - expected;
            res.statistic += d * d / expected;
        }
    res.dof = (rows - 1) * (used_cols > 1 ? used_cols - 1 : 1);
    res.p_value = chi_square_survival(res.statistic, res.dof);
    return res;
}

}  // namespace pirsim
