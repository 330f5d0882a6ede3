#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pirsim/protocol.hpp"
#include "pirsim/serialize.hpp"

using namespace pirsim;

TEST_SUITE("serialize") {

TEST_CASE("query pairs round-trip through json") {
    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        QueryPair q = gen_query_pair(1 + rng.below(6), 6, rng);
        auto j = to_json(q);
        QueryPair back = query_pair_from_json(j);
        CHECK(back.index == q.index);
        CHECK(back.b == q.b);
        CHECK(back.q1 == q.q1);
        CHECK(back.q2 == q.q2);
        CHECK(back.seed1 == q.seed1);
        CHECK(back.seed2 == q.seed2);
    }
}

TEST_CASE("tampered query serializations are rejected") {
    Rng rng(2);
    QueryPair q = gen_query_pair(2, 4, rng);
    auto j = to_json(q);
    j["Q1"][0] = int(j["Q1"][0]) == 0 ? 1 : 0;
    CHECK_THROWS_AS(query_pair_from_json(j), std::invalid_argument);
    auto j2 = to_json(q);
    j2["Q2"][1] = 7;
    CHECK_THROWS_AS(query_pair_from_json(j2), std::invalid_argument);
}

TEST_CASE("lattice descriptions round-trip and default the generator") {
    std::vector<std::uint64_t> gen{1, 0, 1, 2, 0, 1, 1, 1};
    auto pair = build_nested_pair(4, 3, 2, 0.25, gen);
    auto back = lattice_from_json(to_json(pair));
    CHECK(back.n == pair.n);
    CHECK(back.p == pair.p);
    CHECK(back.k == pair.k);
    CHECK(back.gamma == pair.gamma);
    CHECK(back.gen == pair.gen);
    CHECK(back.offsets == pair.offsets);

    auto j = to_json(pair);
    j.erase("G_code");
    auto defaulted = lattice_from_json(j);
    CHECK(defaulted.gen == build_nested_pair(4, 3, 2, 0.25).gen);
}

TEST_CASE("channel realizations round-trip") {
    Rng rng(3);
    auto ch = draw_channel(5, 0.25, 2.0, rng);
    auto back = channel_from_json(to_json(ch));
    CHECK(back.num_servers == 5);
    CHECK(back.h == ch.h);
    CHECK(back.g == ch.g);
    CHECK(back.sigma_y2 == ch.sigma_y2);
    CHECK(back.sigma_w2 == ch.sigma_w2);

    auto j = to_json(ch);
    j["h"] = std::vector<double>{1.0};  // length mismatch
    CHECK_THROWS_AS(channel_from_json(j), std::invalid_argument);
}

TEST_CASE("partition plans serialize with one-based groups") {
    std::vector<double> h{1.0, 1.0, 2.0}, g{1.0, -1.0, 0.5};
    auto plan = make_partition(h, g, {0, 1}, {2});
    auto j = to_json(plan);
    CHECK(j["group1"] == nlohmann::json({1, 2}));
    CHECK(j["group2"] == nlohmann::json({3}));
    CHECK(double(j["scale"]) == plan.scale);
    CHECK(j["sign_flips"].size() == 3);
}

TEST_CASE("rate reports name their binding branch") {
    auto r = rate_theorem1(1.0, 0.01, 1.0);
    auto j = to_json(r);
    CHECK(j["binding_branch"] == "eavesdropper1");
    CHECK(double(j["rate_nats"]) == r.rate_nats);
    CHECK(double(j["rate_bits"]) == r.rate_bits());
    CHECK(bool(j["feasible"]));

    auto rs = rate_theorem1(1.0, 0.01, 1e9);
    CHECK(to_json(rs)["binding_branch"] == "self_noise");
}

TEST_CASE("round transcripts expose only user-visible fields") {
    auto pair = build_nested_pair(8, 5, 1, 0.2);
    MessageStore store = make_message_store(5, 4, 8, 11);
    auto ch = unit_channel(2, 0.0, 1.0);
    RoundTranscript t;
    run_retrieval(store, 2, ch, pair, 1.0, Mode::non_fading, 1, Optimizer::greedy, &t);
    auto j = to_json(t, 2);
    CHECK(j.contains("query"));
    CHECK(j.contains("plan"));
    CHECK(j.contains("blocks"));
    CHECK(j.contains("message"));
    CHECK(j["plan"]["mode"] == "non_fading");
    CHECK(j["blocks"].size() == 8);
    CHECK(j["plan"]["combining_gain"] == 1.0);
}

TEST_CASE("store csv round-trips and validates") {
    MessageStore store = make_message_store(5, 6, 10, 21);
    std::ostringstream os;
    write_store_csv(os, store);
    std::istringstream is(os.str());
    MessageStore back = read_store_csv(is, 5);
    CHECK(back.num_messages == store.num_messages);
    CHECK(back.length == store.length);
    CHECK(back.symbols == store.symbols);

    std::istringstream ragged("1,2,3\n4,5\n");
    CHECK_THROWS_AS(read_store_csv(ragged, 5), std::invalid_argument);
    std::istringstream junk("1,x,3\n");
    CHECK_THROWS_AS(read_store_csv(junk, 5), std::invalid_argument);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_store_csv(empty, 5), std::invalid_argument);
    std::istringstream big("7,8,9\n");
    CHECK_THROWS_AS(read_store_csv(big, 5), std::invalid_argument);
    std::istringstream composite("1,2\n");
    CHECK_THROWS_AS(read_store_csv(composite, 6), std::invalid_argument);
}

TEST_CASE("doubles print with shortest round-trip precision") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1.4585052734695925) == "1.4585052734695925");
    Rng rng(31);
    for (int rep = 0; rep < 2000; ++rep) {
        double v = (rng.next_double() - 0.5) * std::pow(10.0, double(rng.below(60)) - 30.0);
        double back = std::stod(format_double(v));
        CHECK(back == v);
    }
}

TEST_CASE("table csv emits a header and one line per row") {
    std::ostringstream os;
    write_table_csv(os, {"a", "b"}, {{1.0, 2.5}, {-0.125, 3.0}});
    CHECK(os.str() == "a,b\n1,2.5\n-0.125,3\n");
}

}  // TEST_SUITE
