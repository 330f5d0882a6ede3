#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pirsim {

// z for the central 95% of a standard normal.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

// Normal-approximation interval for a sample mean.
Interval mean_interval(std::span<const double> samples, double z = kZ95);

double sample_mean(std::span<const double> samples);
double sample_variance(std::span<const double> samples);  // unbiased

// Streaming first/second moments; merge order must be fixed for determinism.
struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t count = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    void merge(const Moments& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean() const;
    double variance() const;  // unbiased
    Interval mean_ci(double z = kZ95) const;
};

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 0.0;
};

// Goodness of fit of observed counts against uniform cell probabilities.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

// Homogeneity across rows of a contingency table (rows x cols, row-major).
ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> table, std::size_t rows,
                                       std::size_t cols);

}  // namespace pirsim
