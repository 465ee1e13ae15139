#include <doctest.h>

#include "support/testing.hpp"

using namespace cnav;
using namespace cnav::testing;

TEST_CASE("referent compatibility table") {
    const auto none = Referent::none();
    const auto gen = Referent::generic();
    const auto alice = Referent::named("Alice");
    const auto bob = Referent::named("Bob");

    CHECK(referents_compatible(gen, gen));
    CHECK(referents_compatible(gen, none));
    CHECK(referents_compatible(none, gen));
    CHECK(referents_compatible(gen, alice));
    CHECK(referents_compatible(alice, gen));
    CHECK(referents_compatible(none, none));
    CHECK(referents_compatible(alice, alice));
    CHECK_FALSE(referents_compatible(alice, bob));
    CHECK_FALSE(referents_compatible(none, alice));
    CHECK_FALSE(referents_compatible(alice, none));
}

TEST_CASE("graph construction invariants") {
    CHECK(error_code([] { ConceptTerm(""); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { ConceptTerm("A B"); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { ConceptTerm("A:B"); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { Referent::named(""); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { KclGraph(ConceptTerm("A"), std::nullopt, ConceptTerm("B")); }) ==
          ErrorCode::InvariantViolation);
    CHECK_FALSE(error_code([] { KclGraph(ConceptTerm("TIME-PERIOD")); }));

    CHECK(error_code([] { check_weight(-0.01); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { check_weight(1.01); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([] { check_weight(std::nan("")); }) == ErrorCode::InvariantViolation);
    CHECK_FALSE(error_code([] { check_weight(0.0); }));
    CHECK_FALSE(error_code([] { check_weight(1.0); }));
}

TEST_CASE("text notation") {
    auto g = parse_graph("[LITTLE_GIRL : Alice] \xE2\x86\x92 [LOOK_AT] \xE2\x86\x92 [CATERPILLAR : #]");
    CHECK(g.source() == ConceptTerm("LITTLE_GIRL", Referent::named("Alice")));
    CHECK(g.predicate() == ConceptTerm("LOOK_AT"));
    CHECK(g.destination() == ConceptTerm("CATERPILLAR", Referent::generic()));
    CHECK(to_string(g) == "[LITTLE_GIRL:Alice]->[LOOK_AT]->[CATERPILLAR:#]");
    CHECK(parse_graph(to_string(g)) == g);

    auto two = parse_graph("[A]->[REL]");
    CHECK(two.terms().size() == 2);
    CHECK_FALSE(two.destination());

    CHECK(error_code([] { parse_graph("[A]->[B]->[C]->[D]"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { parse_graph("A->[B]"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { parse_graph("[A:]"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { parse_graph("[]"); }) == ErrorCode::ParseError);
}

TEST_CASE("strict match") {
    CHECK(match_strict(G("[A:x]->[R]->[B]"), G("[A:#]->[R]->[B:#]")));
    CHECK_FALSE(match_strict(G("[A:x]->[R]->[B]"), G("[A:y]->[R]->[B]")));
    CHECK_FALSE(match_strict(G("[A]->[R]->[B]"), G("[A]->[R]")));
    CHECK_FALSE(match_strict(G("[A]->[R]"), G("[A]")));
    CHECK_FALSE(match_strict(G("[A]->[R]->[B]"), G("[A]->[R]->[C]")));
    CHECK(match_strict(G("[A]"), G("[A]")));
    CHECK_FALSE(match_strict(G("[A]"), G("[A:x]")));
}

TEST_CASE("simplify keeps the first position and the largest weight") {
    Csv in{W("[A]", 0.2), W("[B]", 0.5), W("[A]", 0.7), W("[B]", 0.1)};
    Csv out = simplify(in);
    REQUIRE(out.size() == 2);
    CHECK(out.entries[0] == W("[A]", 0.7));
    CHECK(out.entries[1] == W("[B]", 0.5));

    // [A:#] and [A] are distinct graphs even though they match strictly
    CHECK(simplify(Csv{W("[A:#]"), W("[A]")}).size() == 2);
}

TEST_CASE("merge is a weighted union") {
    Csv a{W("[A]", 0.3), W("[B]", 1.0)};
    Csv b{W("[A]", 0.9), W("[C]", 0.4)};
    Csv m = merge_into(a, b);
    REQUIRE(m.size() == 3);
    CHECK(m.entries[0] == W("[A]", 0.9));
    CHECK(m.entries[1] == W("[B]", 1.0));
    CHECK(m.entries[2] == W("[C]", 0.4));
}

namespace {

KclGraph random_graph(Rng& rng) {
    static const char* types[] = {"A", "B", "C", "D"};
    auto term = [&] {
        const int k = uniform_int(rng, 0, 2);
        Referent r = k == 0 ? Referent::none() : k == 1 ? Referent::generic() : Referent::named(coin(rng) ? "x" : "y");
        return ConceptTerm(types[uniform_int(rng, 0, 3)], r);
    };
    const int arity = uniform_int(rng, 1, 3);
    std::optional<ConceptTerm> p, d;
    if (arity >= 2) p = ConceptTerm("R");
    if (arity == 3) d = term();
    return KclGraph(term(), p, d);
}

Csv random_csv(Rng& rng, int max_entries) {
    Csv out;
    const int n = uniform_int(rng, 0, max_entries);
    for (int i = 0; i < n; ++i) out.entries.push_back({random_graph(rng), uniform_int(rng, 0, 4) / 4.0});
    return out;
}

}  // namespace

TEST_CASE("property: strict match is reflexive and symmetric") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        auto a = random_graph(rng);
        auto b = random_graph(rng);
        CHECK(match_strict(a, a));
        CHECK(match_strict(a, b) == match_strict(b, a));
        CHECK(match_strict(a, b) == oracle::match(a, b, nullptr));
    }
}

TEST_CASE("property: simplify and merge") {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        auto a = random_csv(rng, 12);
        auto b = random_csv(rng, 12);
        auto s = simplify(a);
        CHECK(simplify(s) == s);
        for (const auto& e : a.entries) CHECK(s.contains(e.graph));
        for (std::size_t x = 0; x < s.size(); ++x) {
            for (std::size_t y = x + 1; y < s.size(); ++y) CHECK_FALSE(s.entries[x].graph == s.entries[y].graph);
        }

        auto m = merge_into(a, b);
        CHECK(m == oracle::merge(a, b));
        CHECK(merge_into(m, m) == m);
        // union is commutative up to entry order
        auto n = merge_into(b, a);
        CHECK(m.size() == n.size());
        for (const auto& e : m.entries) {
            auto it = std::find_if(n.entries.begin(), n.entries.end(),
                                   [&](const WeightedGraph& x) { return x.graph == e.graph; });
            REQUIRE(it != n.entries.end());
            CHECK(it->weight == e.weight);
        }
    }
}
