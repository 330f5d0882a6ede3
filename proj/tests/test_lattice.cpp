#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pirsim/lattice.hpp"
#include "pirsim/rng.hpp"
#include "pirsim/stats.hpp"

using namespace pirsim;

namespace {

// Wrap-aware coordinate equality: both sides reduced into the same cell may
// legitimately differ by a full cell edge at the boundary.
bool same_mod(double a, double b, double step, double tol) {
    return std::abs(centered_mod(a - b, step)) <= tol;
}

// Exhaustive nearest-point oracle: enumerates, for every coset and every
// coordinate, the three integer shifts bracketing the target and minimizes
// the distance over the full cartesian product. Independent of the
// per-coordinate rounding shortcut inside quantize_fine.
double nearest_distance_oracle(const std::vector<double>& s, const NestedLatticePair& pair) {
    const double step = pair.step();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pair.num_cosets; ++c) {
        std::vector<std::array<double, 3>> cand(pair.n);
        for (std::size_t j = 0; j < pair.n; ++j) {
            double o = pair.offsets[c * pair.n + j];
            double base = std::floor((s[j] - o) / step);
            for (int d = 0; d < 3; ++d) cand[j][d] = o + (base + double(d - 1)) * step;
        }
        std::vector<std::size_t> pick(pair.n, 0);
        for (;;) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < pair.n; ++j) {
                double diff = s[j] - cand[j][pick[j]];
                d2 += diff * diff;
            }
            best = std::min(best, d2);
            std::size_t j = 0;
            while (j < pair.n && ++pick[j] == 3) pick[j++] = 0;
            if (j == pair.n) break;
        }
    }
    return best;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
    return d2;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("construction validates its inputs") {
    CHECK_THROWS_AS(build_nested_pair(4, 4, 1, 1.0), std::invalid_argument);   // p not prime
    CHECK_THROWS_AS(build_nested_pair(4, 5, 0, 1.0), std::invalid_argument);   // k = 0
    CHECK_THROWS_AS(build_nested_pair(4, 5, 5, 1.0), std::invalid_argument);   // k > n
    CHECK_THROWS_AS(build_nested_pair(4, 5, 1, 0.0), std::invalid_argument);   // gamma
    CHECK_THROWS_AS(build_nested_pair(25, 2, 21, 1.0), std::invalid_argument); // 2^21 cosets
    std::vector<std::uint64_t> dep{1, 2, 1, 2, 4, 2};  // second row = 2 * first
    CHECK_THROWS_AS(build_nested_pair(3, 5, 2, 1.0, dep), std::invalid_argument);
    std::vector<std::uint64_t> wrong{1, 0, 0};
    CHECK_THROWS_AS(build_nested_pair(4, 5, 1, 1.0, wrong), std::invalid_argument);
}

TEST_CASE("volumes, rate and coset count follow the construction") {
    auto pair = build_nested_pair(8, 5, 1, 0.2);
    CHECK(pair.num_cosets == 5);
    CHECK(pair.step() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pair.rate_nats() == doctest::Approx(std::log(5.0) / 8.0).epsilon(1e-15));
    CHECK(pair.fine_volume_pow() ==
          doctest::Approx(0.04 * std::pow(5.0, 2.0 * 7.0 / 8.0)).epsilon(1e-14));
    CHECK(pair.coarse_volume_pow() == doctest::Approx(1.0).epsilon(1e-14));

    auto pair2 = build_nested_pair(4, 3, 2, 0.5);
    CHECK(pair2.num_cosets == 9);
    CHECK(pair2.fine_volume_pow() == doctest::Approx(0.25 * 3.0).epsilon(1e-14));
}

TEST_CASE("coset index is big-endian in the information symbols") {
    auto pair = build_nested_pair(4, 3, 2, 1.0);
    std::vector<std::uint64_t> u{1, 0};
    CHECK(pair.coset_index(u) == 3);  // u[0] carries weight p
    std::vector<std::uint64_t> v{0, 2};
    CHECK(pair.coset_index(v) == 2);
    for (std::size_t i = 0; i < pair.num_cosets; ++i) {
        auto sym = pair.coset_symbols(i);
        CHECK(pair.coset_index(sym) == i);
    }
    std::vector<std::uint64_t> bad{3, 0};
    CHECK_THROWS_AS(pair.coset_index(bad), std::invalid_argument);
}

TEST_CASE("encode and decode invert each other on every coset") {
    std::vector<std::uint64_t> gen{1, 0, 1, 2, 0, 1, 1, 1};
    auto pair = build_nested_pair(4, 3, 2, 0.25, gen);
    for (std::size_t i = 0; i < pair.num_cosets; ++i) {
        auto u = pair.coset_symbols(i);
        auto x = encode_symbols(u, pair);
        CHECK(decode_coset(x, pair) == u);
    }
}

TEST_CASE("decode accepts coarse shifts and rejects off-lattice points") {
    auto pair = build_nested_pair(6, 5, 1, 0.5);
    Rng rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::uint64_t> u{rng.below(5)};
        auto x = encode_symbols(u, pair);
        for (auto& v : x) v += pair.step() * double(std::int64_t(rng.below(21)) - 10);
        CHECK(decode_coset(x, pair) == u);
    }
    std::vector<double> off(6, 0.0);
    off[2] = 0.3 * pair.gamma;
    CHECK_THROWS_AS(decode_coset(off, pair), std::domain_error);
}

TEST_CASE("coset map is a homomorphism, exhaustively for small primes") {
    // Dyadic gamma keeps representatives, sums and integer scalings exact in
    // floating point, so the checks below are equality, not tolerance.
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        auto pair = build_nested_pair(6, p, 1, 0.25);
        for (std::uint64_t u = 0; u < p; ++u) {
            auto xu = encode_symbols(std::vector<std::uint64_t>{u}, pair);
            for (std::uint64_t v = 0; v < p; ++v) {
                auto xv = encode_symbols(std::vector<std::uint64_t>{v}, pair);
                std::vector<double> sum(pair.n);
                for (std::size_t j = 0; j < pair.n; ++j) sum[j] = xu[j] + xv[j];
                auto dec = decode_coset(sum, pair);
                CHECK(dec[0] == (u + v) % p);
            }
            for (std::int64_t a : {-3, -1, 0, 2, 5}) {
                std::vector<double> scaled(pair.n);
                for (std::size_t j = 0; j < pair.n; ++j) scaled[j] = double(a) * xu[j];
                auto dec = decode_coset(scaled, pair);
                std::int64_t want = (std::int64_t(u) * a) % std::int64_t(p);
                if (want < 0) want += std::int64_t(p);
                CHECK(dec[0] == std::uint64_t(want));
            }
        }
    }
}

TEST_CASE("homomorphism holds for vector information symbols") {
    auto pair = build_nested_pair(4, 3, 2, 0.5);
    for (std::size_t i = 0; i < 9; ++i) {
        auto u = pair.coset_symbols(i);
        auto xu = encode_symbols(u, pair);
        for (std::size_t j2 = 0; j2 < 9; ++j2) {
            auto v = pair.coset_symbols(j2);
            auto xv = encode_symbols(v, pair);
            std::vector<double> sum(pair.n);
            for (std::size_t j = 0; j < pair.n; ++j) sum[j] = xu[j] + xv[j];
            auto dec = decode_coset(sum, pair);
            for (std::size_t t = 0; t < 2; ++t) CHECK(dec[t] == (u[t] + v[t]) % 3);
        }
    }
}

TEST_CASE("centered reduction lands in the half-open cell and preserves the class") {
    Rng rng(23);
    for (int rep = 0; rep < 100000; ++rep) {
        double step = 0.1 + 4.0 * rng.next_double();
        double x = (rng.next_double() - 0.5) * 50.0 * step;
        double r = centered_mod(x, step);
        CHECK(r >= -0.5 * step);
        CHECK(r < 0.5 * step);
        double quotient = (x - r) / step;
        CHECK(std::abs(quotient - std::nearbyint(quotient)) <= 1e-9 * (1.0 + std::abs(quotient)));
    }
}

TEST_CASE("mod arithmetic identities hold on random inputs") {
    auto pair = build_nested_pair(5, 5, 1, 0.3);
    const double step = pair.step();
    Rng rng(29);
    auto rand_vec = [&](double span) {
        std::vector<double> v(pair.n);
        for (auto& x : v) x = (rng.next_double() - 0.5) * span;
        return v;
    };
    for (int rep = 0; rep < 10000; ++rep) {
        auto s = rand_vec(12.0 * step);
        auto t = rand_vec(12.0 * step);
        const double tol = 1e-12 * 20.0 * step;

        // Shift compatibility: [s + t] mod L == [[s] mod L + t] mod L.
        auto ms = mod_coarse(s, pair);
        std::vector<double> st(pair.n), mst(pair.n);
        for (std::size_t j = 0; j < pair.n; ++j) {
            st[j] = s[j] + t[j];
            mst[j] = ms[j] + t[j];
        }
        auto lhs = mod_coarse(st, pair);
        auto rhs = mod_coarse(mst, pair);
        for (std::size_t j = 0; j < pair.n; ++j) CHECK(same_mod(lhs[j], rhs[j], step, tol));

        // Integer scaling: [a s] mod L == [a ([s] mod L)] mod L.
        std::int64_t a = std::int64_t(rng.below(13)) - 6;
        std::vector<double> as(pair.n), ams(pair.n);
        for (std::size_t j = 0; j < pair.n; ++j) {
            as[j] = double(a) * s[j];
            ams[j] = double(a) * ms[j];
        }
        auto zl = mod_coarse(as, pair);
        auto zr = mod_coarse(ams, pair);
        double ztol = 1e-12 * (1.0 + std::abs(double(a))) * 20.0 * step;
        for (std::size_t j = 0; j < pair.n; ++j) CHECK(same_mod(zl[j], zr[j], step, ztol));

        // Real scaling into the scaled lattice: beta [s] mod L == [beta s] mod (beta L).
        double beta = (rng.next_double() - 0.5) * 6.0;
        if (std::abs(beta) > 1e-3) {
            double bstep = std::abs(beta) * step;
            for (std::size_t j = 0; j < pair.n; ++j) {
                double left = beta * ms[j];
                double right = centered_mod(beta * s[j], bstep);
                CHECK(same_mod(left, right, bstep, 1e-12 * 40.0 * bstep / std::min(1.0, std::abs(beta))));
            }
        }

        // Quantize-then-mod equals mod-then-quantize-then-mod.
        auto q1 = mod_coarse(quantize_fine(s, pair), pair);
        auto q2 = mod_coarse(quantize_fine(ms, pair), pair);
        for (std::size_t j = 0; j < pair.n; ++j) CHECK(same_mod(q1[j], q2[j], step, tol));
    }
}

TEST_CASE("mod reduction is idempotent bit for bit") {
    auto pair = build_nested_pair(3, 7, 1, 0.35);
    Rng rng(31);
    for (int rep = 0; rep < 10000; ++rep) {
        std::vector<double> s(pair.n);
        for (auto& x : s) x = (rng.next_double() - 0.5) * 100.0;
        auto once = mod_coarse(s, pair);
        auto twice = mod_coarse(once, pair);
        CHECK(once == twice);
    }
}

TEST_CASE("quantizer matches the exhaustive nearest-point oracle") {
    auto pair = build_nested_pair(4, 3, 2, 0.7);
    Rng rng(37);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> s(pair.n);
        for (auto& x : s) x = (rng.next_double() - 0.5) * 8.0 * pair.step();
        auto q = quantize_fine(s, pair);
        CHECK_NOTHROW(decode_coset(q, pair));  // the result is a fine-lattice point
        double got = dist2(s, q);
        double want = nearest_distance_oracle(s, pair);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("quantizer tie-breaks are the documented ones") {
    // 1D fine lattice gamma Z: s sits exactly between two cosets' points.
    auto line = build_nested_pair(1, 5, 1, 0.2);
    auto q = quantize_fine(std::vector<double>{0.1}, line);
    CHECK(q[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(decode_coset(q, line) == std::vector<std::uint64_t>{0});

    // The lexicographically smaller winner appears after the first-found tie.
    auto q2 = quantize_fine(std::vector<double>{-0.1}, line);
    CHECK(q2[0] == doctest::Approx(-0.2).epsilon(1e-13));
    CHECK(decode_coset(q2, line) == std::vector<std::uint64_t>{4});

    // Half-cell offsets within one coset round toward the smaller point.
    auto plane = build_nested_pair(2, 3, 1, 1.0);
    auto q3 = quantize_fine(std::vector<double>{1.5, 1.5}, plane);
    CHECK(q3[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q3[1] == doctest::Approx(1.0).epsilon(1e-15));

    auto pair5 = build_nested_pair(2, 5, 1, 0.2);
    auto q4 = quantize_fine(std::vector<double>{0.5, -0.5}, pair5);
    CHECK(q4[0] == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(q4[1] == doctest::Approx(-0.6).epsilon(1e-13));
    CHECK(decode_coset(q4, pair5) == std::vector<std::uint64_t>{2});
}

TEST_CASE("coset sampler stays on the coset and is reproducible") {
    auto pair = build_nested_pair(8, 5, 1, 0.2);
    for (std::uint64_t u = 0; u < 5; ++u) {
        auto lambda = encode_symbols(std::vector<std::uint64_t>{u}, pair);
        auto a = sample_coset_gaussian(lambda, 1.0, derive_seed(5, u), pair);
        auto b = sample_coset_gaussian(lambda, 1.0, derive_seed(5, u), pair);
        CHECK(a == b);
        for (std::size_t j = 0; j < pair.n; ++j) {
            double m = (a[j] - lambda[j]) / pair.step();
            CHECK(std::abs(m - std::nearbyint(m)) <= 1e-9);
        }
        CHECK(decode_coset(a, pair) == std::vector<std::uint64_t>{u});
    }
    std::vector<double> lam(8, 0.0);
    CHECK_THROWS_AS(sample_coset_gaussian(lam, 0.0, 1, pair), std::invalid_argument);
}

TEST_CASE("coset sampler second moment matches the exact series") {
    auto pair = build_nested_pair(8, 5, 1, 0.2);
    const double sigma = 1.0;
    for (std::uint64_t u : {0ull, 2ull, 4ull}) {
        auto lambda = encode_symbols(std::vector<std::uint64_t>{u}, pair);
        // Truncated series over the same support the sampler enumerates; the
        // tail beyond 12 sigma adds less than e^-70 relative mass.
        const double step = pair.step();
        double c = -lambda[0] / step;
        double t = std::ceil(12.0 * sigma / step) + 1.0;
        double mass = 0.0, second = 0.0;
        for (double m = std::ceil(c - t); m <= std::floor(c + t); ++m) {
            double v = lambda[0] + m * step;
            double w = std::exp(-v * v / (2.0 * sigma * sigma));
            mass += w;
            second += v * v * w;
        }
        double expect = second / mass;

        Moments mc;
        for (std::uint64_t rep = 0; rep < 30000; ++rep) {
            auto x = sample_coset_gaussian(lambda, sigma, derive_seed(101, u, rep), pair);
            for (double v : x) mc.add(v * v);
        }
        auto ci = mc.mean_ci(5.0);
        CHECK(ci.lo <= expect);
        CHECK(expect <= ci.hi);
    }
}

TEST_CASE("dithered encoding carries the information symbols") {
    auto pair = build_nested_pair(8, 5, 1, 0.2);
    Rng rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::uint64_t> u{rng.below(5)};
        auto cw = encode_and_sample(u, 1.0, rng.next_u64(), pair);
        CHECK(cw.info == u);
        CHECK(decode_coset(cw.x, pair) == u);
    }
}

}  // TEST_SUITE
