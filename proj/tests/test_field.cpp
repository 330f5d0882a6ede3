#include <doctest.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pirsim/field.hpp"
#include "pirsim/stats.hpp"

using namespace pirsim;

namespace {

// Independent answer oracle: plain nested loop over signed accumulators.
std::vector<std::int64_t> answer_oracle(const std::vector<std::int8_t>& query,
                                        const MessageStore& store) {
    std::vector<std::int64_t> acc(store.length, 0);
    for (std::size_t m = 0; m < store.num_messages; ++m)
        for (std::size_t l = 0; l < store.length; ++l)
            acc[l] += std::int64_t(query[m]) * std::int64_t(store.at(m, l));
    for (auto& v : acc) {
        v %= std::int64_t(store.p);
        if (v < 0) v += std::int64_t(store.p);
    }
    return acc;
}

MessageStore identity_store(std::uint64_t p, std::size_t m) {
    MessageStore store;
    store.p = p;
    store.num_messages = m;
    store.length = m;
    store.symbols.assign(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) store.at(i, i) = 1 % p;
    return store;
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("primality by trial division") {
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(is_prime(5));
    CHECK(is_prime(13));
    CHECK(is_prime(101));
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(4));
    CHECK_FALSE(is_prime(91));  // 7 * 13
}

TEST_CASE("query masks follow the sign rule exhaustively") {
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        for (std::size_t M = 1; M <= 6; ++M) {
            MessageStore eye = identity_store(p, M);
            for (std::size_t mask = 0; mask < (std::size_t(1) << M); ++mask) {
                std::vector<std::uint8_t> b(M);
                for (std::size_t m = 0; m < M; ++m) b[m] = (mask >> m) & 1;
                for (std::size_t i = 1; i <= M; ++i) {
                    QueryPair q = make_query_pair(i, M, b, 11, 22);
                    REQUIRE(q.q1.size() == M);
                    REQUIRE(q.q2.size() == M);
                    for (std::size_t m = 0; m < M; ++m) {
                        CHECK(q.q1[m] == std::int8_t(b[m]));
                        std::int8_t expect =
                            (m == i - 1) ? (b[m] ? 0 : -1) : std::int8_t(-int(b[m]));
                        CHECK(q.q2[m] == expect);
                    }
                    // Combined answer on the identity store: exactly one
                    // nonzero coefficient, +/-1 at the requested slot.
                    auto a1 = compute_answer(q.q1, eye);
                    auto a2 = compute_answer(q.q2, eye);
                    for (std::size_t l = 0; l < M; ++l) {
                        std::uint64_t sum = (a1[l] + a2[l]) % p;
                        std::uint64_t expect =
                            (l == i - 1) ? (b[l] ? 1 % p : (p - 1) % p) : 0;
                        CHECK(sum == expect);
                    }
                    auto rec = recover_message_sign({(a1[i - 1] + a2[i - 1]) % p}, b[i - 1], p);
                    CHECK(rec[0] == 1 % p);
                }
            }
        }
    }
}

TEST_CASE("combined answers recover the requested row of a random store") {
    Rng rng(404);
    for (std::uint64_t p : {2ull, 3ull, 5ull, 13ull}) {
        MessageStore store = make_message_store(p, 5, 9, derive_seed(99, p));
        for (int rep = 0; rep < 40; ++rep) {
            std::size_t i = 1 + std::size_t(rng.below(5));
            QueryPair q = gen_query_pair(i, 5, rng);
            auto a1 = compute_answer(q.q1, store);
            auto a2 = compute_answer(q.q2, store);
            std::vector<std::uint64_t> sum(store.length);
            for (std::size_t l = 0; l < store.length; ++l) sum[l] = (a1[l] + a2[l]) % p;
            auto rec = recover_message_sign(sum, q.b[i - 1] != 0, p);
            for (std::size_t l = 0; l < store.length; ++l) CHECK(rec[l] == store.at(i - 1, l));
        }
    }
}

TEST_CASE("answers match the signed-accumulator oracle") {
    Rng rng(7);
    for (std::uint64_t p : {3ull, 5ull, 101ull}) {
        MessageStore store = make_message_store(p, 6, 12, derive_seed(3, p));
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<std::int8_t> q(store.num_messages);
            for (auto& v : q) v = std::int8_t(int(rng.below(3)) - 1);  // {-1, 0, 1}
            auto got = compute_answer(q, store);
            std::vector<std::int8_t> qv(q.begin(), q.end());
            auto want = answer_oracle(qv, store);
            REQUIRE(got.size() == want.size());
            for (std::size_t l = 0; l < got.size(); ++l)
                CHECK(got[l] == std::uint64_t(want[l]));
        }
    }
}

TEST_CASE("sign recovery is an involution and trivial at p = 2") {
    std::vector<std::uint64_t> v{0, 1, 2, 3, 4};
    auto neg = recover_message_sign(v, false, 5);
    CHECK(neg == std::vector<std::uint64_t>{0, 4, 3, 2, 1});
    CHECK(recover_message_sign(neg, false, 5) == v);
    CHECK(recover_message_sign(v, true, 5) == v);
    std::vector<std::uint64_t> bits{0, 1, 1, 0};
    CHECK(recover_message_sign(bits, false, 2) == bits);
}

TEST_CASE("store generation is deterministic and in range") {
    MessageStore a = make_message_store(5, 8, 33, 1234);
    MessageStore b = make_message_store(5, 8, 33, 1234);
    MessageStore c = make_message_store(5, 8, 33, 1235);
    CHECK(a.symbols == b.symbols);
    CHECK(a.symbols != c.symbols);
    for (auto s : a.symbols) CHECK(s < 5);
}

TEST_CASE("store symbols look uniform") {
    MessageStore store = make_message_store(5, 40, 500, 777);
    std::vector<std::uint64_t> counts(5, 0);
    for (auto s : store.symbols) ++counts[s];
    auto res = chi_square_uniform(counts);
    CHECK(res.dof == 4);
    CHECK(res.p_value > 1e-4);
}

TEST_CASE("query generation validates its arguments") {
    std::vector<std::uint8_t> b{0, 1};
    CHECK_THROWS_AS(make_query_pair(0, 2, b, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_query_pair(3, 2, b, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_query_pair(1, 3, b, 1, 2), std::invalid_argument);
}

}  // TEST_SUITE
