#include "pirsim/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pirsim/field.hpp"
#include "pirsim/rng.hpp"

namespace pirsim {
namespace {

constexpr std::size_t kMaxCosets = 1u << 20;  // offsets table kept in memory

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) r = r * base % p;
        base = base * base % p;
        exp >>= 1;
    }
    return r;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) { return mod_pow(a, p - 2, p); }

// Row-reduces a copy of gen over F_p; returns pivot columns (one per row) or
// fewer when rank-deficient.
std::vector<std::size_t> pivot_columns(std::vector<std::uint64_t> a, std::size_t k, std::size_t n,
                                       std::uint64_t p) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < k; ++col) {
        std::size_t sel = row;
        while (sel < k && a[sel * n + col] == 0) ++sel;
        if (sel == k) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(a[row * n + j], a[sel * n + j]);
        std::uint64_t inv = mod_inv(a[row * n + col], p);
        for (std::size_t j = 0; j < n; ++j) a[row * n + j] = a[row * n + j] * inv % p;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == row || a[r * n + col] == 0) continue;
            std::uint64_t f = a[r * n + col];
            for (std::size_t j = 0; j < n; ++j)
                a[r * n + j] = (a[r * n + j] + (p - f) * a[row * n + j]) % p;
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

// Inverts a k x k matrix over F_p by Gauss-Jordan; input known invertible.
std::vector<std::uint64_t> invert_mod_p(std::vector<std::uint64_t> m, std::size_t k,
                                        std::uint64_t p) {
    std::vector<std::uint64_t> inv(k * k, 0);
    for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1 % p;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t sel = col;
        while (sel < k && m[sel * k + col] == 0) ++sel;
        if (sel == k) throw std::invalid_argument("lattice: pivot submatrix not invertible");
        for (std::size_t j = 0; j < k; ++j) {
            std::swap(m[col * k + j], m[sel * k + j]);
            std::swap(inv[col * k + j], inv[sel * k + j]);
        }
        std::uint64_t f = mod_inv(m[col * k + col], p);
        for (std::size_t j = 0; j < k; ++j) {
            m[col * k + j] = m[col * k + j] * f % p;
            inv[col * k + j] = inv[col * k + j] * f % p;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || m[r * k + col] == 0) continue;
            std::uint64_t g = m[r * k + col];
            for (std::size_t j = 0; j < k; ++j) {
                m[r * k + j] = (m[r * k + j] + (p - g) * m[col * k + j]) % p;
                inv[r * k + j] = (inv[r * k + j] + (p - g) * inv[col * k + j]) % p;
            }
        }
    }
    return inv;
}

// Residue -> centered representative in [-p/2, p/2); the boundary residue of
// even p maps down so the map is compatible with addition mod p.
double center_residue(std::uint64_t r, std::uint64_t p) {
    return (2 * r >= p) ? double(r) - double(p) : double(r);
}

}  // namespace

double NestedLatticePair::rate_nats() const { return double(k) * std::log(double(p)) / double(n); }

double NestedLatticePair::fine_volume_pow() const {
    return gamma * gamma * std::pow(double(p), 2.0 * double(n - k) / double(n));
}

double NestedLatticePair::coarse_volume_pow() const { return step() * step(); }

std::size_t NestedLatticePair::coset_index(std::span<const std::uint64_t> u) const {
    if (u.size() != k) throw std::invalid_argument("lattice: symbol count must equal k");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (u[j] >= p) throw std::invalid_argument("lattice: symbol out of range");
        idx = idx * std::size_t(p) + std::size_t(u[j]);
    }
    return idx;
}

std::vector<std::uint64_t> NestedLatticePair::coset_symbols(std::size_t index) const {
    if (index >= num_cosets) throw std::invalid_argument("lattice: coset index out of range");
    std::vector<std::uint64_t> u(k);
    for (std::size_t j = k; j-- > 0;) {
        u[j] = std::uint64_t(index % p);
        index /= std::size_t(p);
    }
    return u;
}

NestedLatticePair build_nested_pair(std::size_t n, std::uint64_t p, std::size_t k, double gamma,
                                    std::optional<std::vector<std::uint64_t>> gen) {
    if (!is_prime(p)) throw std::invalid_argument("lattice: p must be prime");
    if (n == 0 || k == 0 || k > n) throw std::invalid_argument("lattice: need 0 < k <= n");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("lattice: gamma must be positive and finite");

    NestedLatticePair pair;
    pair.n = n;
    pair.p = p;
    pair.k = k;
    pair.gamma = gamma;
    if (gen) {
        if (gen->size() != k * n) throw std::invalid_argument("lattice: generator must be k x n");
        pair.gen = std::move(*gen);
        for (auto& g : pair.gen) g %= p;
    } else {
        // Striped repetition: coordinate c carries symbol c mod k. For k = 1
        // this is the all-ones repetition row; supports are disjoint, so the
        // rank is k for any p.
        pair.gen.assign(k * n, 0);
        for (std::size_t c = 0; c < n; ++c) pair.gen[(c % k) * n + c] = 1;
    }

    pair.pivot_cols = pivot_columns(pair.gen, k, n, p);
    if (pair.pivot_cols.size() != k)
        throw std::invalid_argument("lattice: generator is rank-deficient over F_p");
    std::vector<std::uint64_t> sub(k * k);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) sub[r * k + c] = pair.gen[r * n + pair.pivot_cols[c]];
    pair.pivot_inv = invert_mod_p(std::move(sub), k, p);

    double cosets = std::pow(double(p), double(k));
    if (cosets > double(kMaxCosets))
        throw std::invalid_argument("lattice: p^k too large to enumerate cosets");
    pair.num_cosets = 1;
    for (std::size_t j = 0; j < k; ++j) pair.num_cosets *= std::size_t(p);

    pair.offsets.resize(pair.num_cosets * n);
    std::vector<std::uint64_t> u(k, 0);
    for (std::size_t idx = 0; idx < pair.num_cosets; ++idx) {
        for (std::size_t col = 0; col < n; ++col) {
            std::uint64_t acc = 0;
            for (std::size_t r = 0; r < k; ++r) acc = (acc + u[r] * pair.gen[r * n + col]) % p;
            pair.offsets[idx * n + col] = gamma * center_residue(acc, p);
        }
        for (std::size_t j = k; j-- > 0;) {  // base-p increment, u[0] most significant
            if (++u[j] < p) break;
            u[j] = 0;
        }
    }
    return pair;
}

std::vector<double> encode_symbols(std::span<const std::uint64_t> u,
                                   const NestedLatticePair& pair) {
    std::size_t idx = pair.coset_index(u);
    return {pair.offsets.begin() + std::ptrdiff_t(idx * pair.n),
            pair.offsets.begin() + std::ptrdiff_t((idx + 1) * pair.n)};
}

std::vector<std::uint64_t> decode_coset(std::span<const double> point,
                                        const NestedLatticePair& pair) {
    if (point.size() != pair.n) throw std::invalid_argument("lattice: point length must equal n");
    const std::uint64_t p = pair.p;
    std::vector<std::uint64_t> residues(pair.n);
    for (std::size_t j = 0; j < pair.n; ++j) {
        double w = point[j] / pair.gamma;
        double m = std::nearbyint(w);
        if (std::abs(w - m) > 1e-9 * (1.0 + std::abs(m)))
            throw std::domain_error("lattice: point is not on the fine lattice");
        long long mi = (long long)(m);
        long long r = mi % (long long)(p);
        if (r < 0) r += (long long)(p);
        residues[j] = std::uint64_t(r);
    }
    std::vector<std::uint64_t> u(pair.k, 0);
    for (std::size_t c = 0; c < pair.k; ++c) {
        std::uint64_t acc = 0;
        for (std::size_t r = 0; r < pair.k; ++r)
            acc = (acc + residues[pair.pivot_cols[r]] * pair.pivot_inv[r * pair.k + c]) % p;
        u[c] = acc;
    }
    for (std::size_t col = 0; col < pair.n; ++col) {  // reject residues outside the code
        std::uint64_t acc = 0;
        for (std::size_t r = 0; r < pair.k; ++r) acc = (acc + u[r] * pair.gen[r * pair.n + col]) % p;
        if (acc != residues[col])
            throw std::domain_error("lattice: point is not on the fine lattice");
    }
    return u;
}

std::vector<double> quantize_fine(std::span<const double> s, const NestedLatticePair& pair) {
    if (s.size() != pair.n) throw std::invalid_argument("lattice: point length must equal n");
    const double step = pair.step();
    std::vector<double> best(pair.n), cand(pair.n);
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < pair.num_cosets; ++idx) {
        const double* off = &pair.offsets[idx * pair.n];
        double d2 = 0.0;
        for (std::size_t j = 0; j < pair.n; ++j) {
            double t = (s[j] - off[j]) / step;
            double m = std::ceil(t - 0.5);  // half-integer ties round down
            cand[j] = off[j] + step * m;
            double d = s[j] - cand[j];
            d2 += d * d;
        }
        bool better = d2 < best_d2;
        if (!better && d2 == best_d2) {  // distance tie: lexicographically smallest point
            for (std::size_t j = 0; j < pair.n; ++j) {
                if (cand[j] != best[j]) {
                    better = cand[j] < best[j];
                    break;
                }
            }
        }
        if (better) {
            best_d2 = d2;
            best = cand;
        }
    }
    return best;
}

double centered_mod(double x, double step) {
    double r = x - step * std::floor(x / step + 0.5);
    if (r < -0.5 * step) r += step;  // guards against rounding just below the cell
    if (r >= 0.5 * step) r -= step;
    return r;
}

std::vector<double> mod_coarse(std::span<const double> s, const NestedLatticePair& pair) {
    if (s.size() != pair.n) throw std::invalid_argument("lattice: point length must equal n");
    std::vector<double> r(pair.n);
    for (std::size_t j = 0; j < pair.n; ++j) r[j] = centered_mod(s[j], pair.step());
    return r;
}

std::vector<double> sample_coset_gaussian(std::span<const double> lambda, double sigma,
                                          std::uint64_t seed, const NestedLatticePair& pair) {
    if (lambda.size() != pair.n)
        throw std::invalid_argument("lattice: coset representative length must equal n");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("lattice: sigma must be positive and finite");
    const double step = pair.step();
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const long long t = (long long)(std::ceil(12.0 * sigma / step)) + 1;
    std::vector<double> x(pair.n);
    for (std::size_t j = 0; j < pair.n; ++j) {
        Rng rng(derive_seed(seed, j));
        const double c = -lambda[j] / step;  // real-valued minimizer of |lambda + step*m|
        const long long lo = (long long)(std::ceil(c - double(t)));
        const long long hi = (long long)(std::floor(c + double(t)));
        const std::uint64_t span = std::uint64_t(hi - lo + 1);
        long long mstar = std::llround(c);
        if (mstar < lo) mstar = lo;
        if (mstar > hi) mstar = hi;
        const double vstar = lambda[j] + step * double(mstar);
        for (;;) {
            long long m = lo + (long long)(rng.below(span));
            double v = lambda[j] + step * double(m);
            double log_ratio = (vstar * vstar - v * v) * inv2s2;  // <= 0 by choice of mstar
            if (rng.next_double() < std::exp(log_ratio)) {
                x[j] = v;
                break;
            }
        }
    }
    return x;
}

LatticeCodeword encode_and_sample(std::span<const std::uint64_t> u, double sigma,
                                  std::uint64_t seed, const NestedLatticePair& pair) {
    LatticeCodeword cw;
    cw.info.assign(u.begin(), u.end());
    std::vector<double> lambda = encode_symbols(u, pair);
    cw.x = sample_coset_gaussian(lambda, sigma, seed, pair);
    return cw;
}

}  // namespace pirsim
