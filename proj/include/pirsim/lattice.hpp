#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pirsim {

// Nested pair: fine lattice gamma*(C + p*Z^n) for a rank-k linear code C over
// F_p, coarse sublattice gamma*p*Z^n. The quotient has p^k cosets, one per
// information vector u in F_p^k.
//
// Conventions fixed here and relied on everywhere:
//  * center(r) maps a residue to the symmetric range: r - p if 2r >= p else r,
//    so representatives lie in [-p/2, p/2) scaled by gamma. (The >= makes the
//    map group-compatible at p = 2.)
//  * mod_coarse reduces each coordinate into the half-open cell
//    [-p*gamma/2, p*gamma/2).
//  * quantize_fine resolves ties toward the lexicographically smallest
//    candidate vector (per coordinate: half-integer offsets round down).
struct NestedLatticePair {
    std::size_t n = 0;
    std::uint64_t p = 0;
    std::size_t k = 0;
    double gamma = 0.0;
    std::vector<std::uint64_t> gen;  // k x n generator, row-major, entries in [0, p)

    // Derived at build time.
    std::size_t num_cosets = 0;            // p^k
    std::vector<double> offsets;           // num_cosets x n centered coset representatives
    std::vector<std::size_t> pivot_cols;   // k pivot columns of gen
    std::vector<std::uint64_t> pivot_inv;  // k x k inverse of the pivot submatrix mod p

    double step() const { return double(p) * gamma; }  // coarse cell edge p*gamma
    double rate_nats() const;                          // (k/n) ln p
    double fine_volume_pow() const;                    // V(fine)^(2/n)  = gamma^2 p^(2(n-k)/n)
    double coarse_volume_pow() const;                  // V(coarse)^(2/n) = (p*gamma)^2

    // Information symbols <-> coset enumeration index (base-p, u[0] most
    // significant). The index order defines all tie-breaks over cosets.
    std::size_t coset_index(std::span<const std::uint64_t> u) const;
    std::vector<std::uint64_t> coset_symbols(std::size_t index) const;
};

// Validates p prime, 0 < k <= n, gamma > 0, rank(gen) = k over F_p, and
// enumerates all p^k coset representatives. Default gen is the striped
// repetition code (coordinate c carries symbol c mod k); for k = 1 that is
// the all-ones repetition row.
NestedLatticePair build_nested_pair(std::size_t n, std::uint64_t p, std::size_t k, double gamma,
                                    std::optional<std::vector<std::uint64_t>> gen = std::nullopt);

// phi: u -> gamma * center(u G mod p); a coset representative of the quotient.
std::vector<double> encode_symbols(std::span<const std::uint64_t> u, const NestedLatticePair& pair);

// Inverse of encode on the fine lattice: accepts any fine-lattice point,
// reduces mod the coarse lattice, and returns the information symbols.
// Throws std::domain_error when the point is not on the fine lattice
// (coordinate tolerance 1e-9 * gamma, relative).
std::vector<std::uint64_t> decode_coset(std::span<const double> point,
                                        const NestedLatticePair& pair);

// Nearest fine-lattice point, enumerating all p^k cosets; O(p^k * n).
std::vector<double> quantize_fine(std::span<const double> s, const NestedLatticePair& pair);

// Coordinate-wise centered reduction with cell edge `step`.
double centered_mod(double x, double step);

// Reduction mod the coarse lattice into [-step/2, step/2)^n.
std::vector<double> mod_coarse(std::span<const double> s, const NestedLatticePair& pair);

// Discrete Gaussian on the coset lambda + step*Z^n, width sigma > 0.
// Per-coordinate rejection over the integer range ceil(c-t)..floor(c+t) with
// c = -lambda_j/step and t = ceil(12 sigma/step) + 1, acceptance by exact
// weight ratio exp((x*^2 - x^2)/(2 sigma^2)); the omitted tail mass is
// below e^-70. Coordinate j uses the sub-stream derive_seed(seed, j), so
// samples are reproducible under any evaluation order.
std::vector<double> sample_coset_gaussian(std::span<const double> lambda, double sigma,
                                          std::uint64_t seed, const NestedLatticePair& pair);

// Dithered codeword: x = sample of the coset phi(u) + coarse lattice.
struct LatticeCodeword {
    std::vector<double> x;
    std::vector<std::uint64_t> info;
};
LatticeCodeword encode_and_sample(std::span<const std::uint64_t> u, double sigma,
                                  std::uint64_t seed, const NestedLatticePair& pair);

}  // namespace pirsim
