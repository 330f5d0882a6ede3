#include "pirsim/field.hpp"

#include <stdexcept>
#include <string>

namespace pirsim {

bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

MessageStore make_message_store(std::uint64_t p, std::size_t num_messages, std::size_t length,
                                std::uint64_t seed) {
    if (!is_prime(p)) throw std::invalid_argument("message store: p must be prime");
    if (num_messages == 0 || length == 0)
        throw std::invalid_argument("message store: need at least one message and one symbol");
    MessageStore store;
    store.p = p;
    store.num_messages = num_messages;
    store.length = length;
    store.symbols.resize(num_messages * length);
    Rng rng(derive_seed(seed, 0x57573042ULL));
    for (auto& s : store.symbols) s = rng.below(p);
    return store;
}

QueryPair make_query_pair(std::size_t index, std::size_t num_messages,
                          std::span<const std::uint8_t> b, std::uint64_t seed1,
                          std::uint64_t seed2) {
    if (num_messages == 0) throw std::invalid_argument("query: empty store");
    if (index < 1 || index > num_messages) throw std::invalid_argument("query: index out of range");
    if (b.size() != num_messages) throw std::invalid_argument("query: mask length mismatch");
    QueryPair q;
    q.index = index;
    q.b.assign(b.begin(), b.end());
    q.q1.resize(num_messages);
    q.q2.resize(num_messages);
    q.seed1 = seed1;
    q.seed2 = seed2;
    for (std::size_t m = 0; m < num_messages; ++m) {
        if (b[m] > 1) throw std::invalid_argument("query: mask entries must be 0 or 1");
        q.q1[m] = std::int8_t(b[m]);
        q.q2[m] = std::int8_t(-std::int8_t(b[m]));
    }
    // Requested slot: q2 gets -b - 1 when b=0 and -b + 1 when b=1, i.e. the
    // bit flipped then negated; q1 + q2 cancels everywhere else.
    std::size_t i = index - 1;
    q.q2[i] = b[i] ? std::int8_t(0) : std::int8_t(-1);
    return q;
}

QueryPair gen_query_pair(std::size_t index, std::size_t num_messages, Rng& rng) {
    if (num_messages == 0) throw std::invalid_argument("query: empty store");
    if (index < 1 || index > num_messages) throw std::invalid_argument("query: index out of range");
    std::vector<std::uint8_t> b(num_messages);
    for (auto& bit : b) bit = std::uint8_t(rng.next_u64() & 1);
    std::uint64_t s1 = rng.next_u64();
    std::uint64_t s2 = rng.next_u64();
    return make_query_pair(index, num_messages, b, s1, s2);
}

std::vector<std::uint64_t> compute_answer(std::span<const std::int8_t> query,
                                          const MessageStore& store) {
    if (query.size() != store.num_messages)
        throw std::invalid_argument("answer: query length must match message count");
    const std::int64_t p = std::int64_t(store.p);
    std::vector<std::uint64_t> a(store.length);
    for (std::size_t l = 0; l < store.length; ++l) {
        std::int64_t acc = 0;
        for (std::size_t m = 0; m < store.num_messages; ++m)
            acc += std::int64_t(query[m]) * std::int64_t(store.at(m, l));
        acc %= p;
        if (acc < 0) acc += p;
        a[l] = std::uint64_t(acc);
    }
    return a;
}

std::vector<std::uint64_t> recover_message_sign(std::vector<std::uint64_t> symbols, bool b_i,
                                                std::uint64_t p) {
    if (b_i) return symbols;  // combined answer already equals +W_i
    for (auto& s : symbols) s = (p - s) % p;
    return symbols;
}

}  // namespace pirsim
