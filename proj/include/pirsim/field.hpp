#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pirsim/rng.hpp"

namespace pirsim {

bool is_prime(std::uint64_t p);

// W: num_messages rows of length symbols each, entries in [0, p).
struct MessageStore {
    std::uint64_t p = 0;
    std::size_t num_messages = 0;
    std::size_t length = 0;
    std::vector<std::uint64_t> symbols;  // row-major, num_messages * length

    std::uint64_t at(std::size_t msg, std::size_t pos) const { return symbols[msg * length + pos]; }
    std::uint64_t& at(std::size_t msg, std::size_t pos) { return symbols[msg * length + pos]; }
};

// Uniform i.i.d. store; fully determined by (p, num_messages, length, seed).
MessageStore make_message_store(std::uint64_t p, std::size_t num_messages, std::size_t length,
                                std::uint64_t seed);

// Query pair hiding the requested index. q1 = b (coefficients in {0,1}),
// q2 = -b - e_i when b[i]=0 and -b + e_i when b[i]=1 (coefficients in {0,-1}),
// so q1 + q2 = -e_i or +e_i and the sign equals b[i]. Each of q1, q2 alone is
// uniform over its 2^M patterns and independent of index.
struct QueryPair {
    std::size_t index = 0;  // requested message, 1-based
    std::vector<std::uint8_t> b;
    std::vector<std::int8_t> q1;  // entries in {0, 1}
    std::vector<std::int8_t> q2;  // entries in {0, -1}
    std::uint64_t seed1 = 0;      // per-group dither seeds drawn with the query
    std::uint64_t seed2 = 0;
};

// Builds the pair for a given mask b; exposed so callers can enumerate masks.
QueryPair make_query_pair(std::size_t index, std::size_t num_messages,
                          std::span<const std::uint8_t> b, std::uint64_t seed1,
                          std::uint64_t seed2);

// Draws b uniformly and two fresh 64-bit group seeds from rng.
QueryPair gen_query_pair(std::size_t index, std::size_t num_messages, Rng& rng);

// a[l] = sum_m q[m] * W[m][l] mod p.
std::vector<std::uint64_t> compute_answer(std::span<const std::int8_t> query,
                                          const MessageStore& store);

// Undoes the +/- sign on the combined answer: negates mod p when b_i = 0.
std::vector<std::uint64_t> recover_message_sign(std::vector<std::uint64_t> symbols, bool b_i,
                                                std::uint64_t p);

}  // namespace pirsim
