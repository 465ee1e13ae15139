#include <doctest.h>

#include "support/testing.hpp"

using namespace cnav;
using namespace cnav::testing;

TEST_CASE("alice description parses") {
    auto rd = parse_rd(read_fixture("alice_rd.xml"));
    CHECK(rd.id == "alice-caterpillar");
    CHECK(rd.title == "Advice from a Caterpillar");
    CHECK(rd.media == "text");
    CHECK(rd.ontology_uri == "http://example.org/ontologies/alice");
    CHECK(rd.time_value == 15.0);
    REQUIRE(rd.pedagogic_role);
    CHECK(*rd.pedagogic_role == PedagogicRole::exposure);

    REQUIRE(rd.content.size() == 4);
    CHECK(rd.content.entries[0] == W("[LITTLE_GIRL:Alice]->[LOOK_AT]->[CATERPILLAR:#]"));
    CHECK(rd.content.entries[1] == W("[LITTLE_GIRL:Alice]->[LOOK_AT]->[SILENTLY]"));
    CHECK(rd.content.entries[2] == W("[LITTLE_GIRL:Alice]->[LOOK_AT]->[TIME-PERIOD:#]"));
    CHECK(rd.content.entries[3] == W("[CATERPILLAR:#]->[SPEAK_TO]->[LITTLE_GIRL:Alice]", 0.8));
    CHECK(rd.prerequisites == Csv{W("[LITTLE_GIRL:Alice]")});
    CHECK(rd.relations == Csv{W("[CATERPILLAR:#]->[SIT_ON]->[MUSHROOM:#]", 0.5)});
    REQUIRE(rd.segments.size() == 2);
    CHECK(rd.segments[1].id == "talk");
    CHECK(rd.segments[1].time_value == 10.0);

    auto ont = load_ontology(read_fixture("alice_ontology.xml"));
    CHECK(validate_rd(rd, ont).empty());
}

TEST_CASE("canonical serialization is a fixed point") {
    auto rd = parse_rd(read_fixture("alice_rd.xml"));
    auto once = serialize_rd(rd);
    CHECK(parse_rd(once) == rd);
    CHECK(serialize_rd(parse_rd(once)) == once);
    CHECK(once.find("poids=\"0.8\"") != std::string::npos);
    CHECK(once.find("poids=\"1\"") == std::string::npos);
}

TEST_CASE("parse errors") {
    const std::string head = R"(<materiau id="r" uri="u" titre="t">)";
    const std::string body = "<ontologie>o</ontologie><temps_utilisation>5</temps_utilisation>"
                             "<description_conceptuelle><phrase_kldp source=\"A\"/></description_conceptuelle>";
    CHECK_FALSE(error_code([&] { parse_rd(head + body + "</materiau>"); }));

    CHECK(error_code([&] { parse_rd(R"(<materiau uri="u" titre="t">)" + body + "</materiau>"); }) ==
          ErrorCode::ParseError);
    CHECK(error_code([&] { parse_rd(head + "<temps_utilisation>5</temps_utilisation>"
                                           "<description_conceptuelle><phrase_kldp source=\"A\"/>"
                                           "</description_conceptuelle></materiau>"); }) == ErrorCode::ParseError);
    CHECK(error_code([&] { parse_rd(head + "<ontologie>o</ontologie><temps_utilisation>5</temps_utilisation>"
                                           "</materiau>"); }) == ErrorCode::InvariantViolation);
    CHECK(error_code([&] { parse_rd(head + "<ontologie>o</ontologie><temps_utilisation>five</temps_utilisation>"
                                           "<description_conceptuelle><phrase_kldp source=\"A\"/>"
                                           "</description_conceptuelle></materiau>"); }) == ErrorCode::ParseError);
    CHECK(error_code([&] { parse_rd(head + "<ontologie>o</ontologie><temps_utilisation>5</temps_utilisation>"
                                           "<description_conceptuelle><phrase_kldp source=\"A\" poids=\"1.5\"/>"
                                           "</description_conceptuelle></materiau>"); }) ==
          ErrorCode::InvariantViolation);
    CHECK(error_code([&] { parse_rd(head + "<ontologie>o</ontologie><temps_utilisation>5</temps_utilisation>"
                                           "<description_conceptuelle><phrase_kldp source=\"A\" "
                                           "destination=\"B\"/></description_conceptuelle></materiau>"); }) ==
          ErrorCode::InvariantViolation);
    CHECK(error_code([&] { parse_rd(head + body); }) == ErrorCode::ParseError);
    CHECK(error_code([&] { parse_rd("<ontologie/>"); }) == ErrorCode::ParseError);

    // unknown descriptive elements are tolerated
    CHECK_FALSE(error_code([&] { parse_rd(head + "<mots_cles>x</mots_cles>" + body + "</materiau>"); }));
}

TEST_CASE("structural invariants") {
    auto base = make_rd("r", csv({"[A]"}), {}, 5);
    CHECK_FALSE(error_code([&] { check_invariants(base); }));

    auto empty = base;
    empty.content = {};
    CHECK(error_code([&] { check_invariants(empty); }) == ErrorCode::InvariantViolation);

    auto negative = base;
    negative.time_value = -1;
    CHECK(error_code([&] { check_invariants(negative); }) == ErrorCode::InvariantViolation);

    auto dup = base;
    dup.content = Csv{W("[A]"), W("[A]", 0.5)};
    CHECK(error_code([&] { check_invariants(dup); }) == ErrorCode::InvariantViolation);

    auto pred_ref = base;
    pred_ref.content = Csv{{KclGraph(ConceptTerm("A"), ConceptTerm("R", Referent::named("x"))), 1.0}};
    CHECK(error_code([&] { check_invariants(pred_ref); }) == ErrorCode::InvariantViolation);

    auto seg = base;
    seg.segments = {{"s", csv({"[A]"}), {}, 1}, {"s", csv({"[B]"}), {}, 1}};
    CHECK(error_code([&] { check_invariants(seg); }) == ErrorCode::InvariantViolation);
    seg.segments = {{"a#b", csv({"[A]"}), {}, 1}};
    CHECK(error_code([&] { check_invariants(seg); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("validation diagnostics") {
    auto ont = load_ontology(read_fixture("alice_ontology.xml"));
    auto rd = make_rd("r", csv({"[LITTLE_GIRL]->[LOOK_AT]->[CATERPILLAR]", "[DRAGON]"}),
                      csv({"[CATERPILLAR]->[LOOK_AT]->[PERSON]"}), 5);
    rd.ontology_uri = "urn:other";
    rd.segments = {{"s1", csv({"[PERSON]"}), {}, 4}, {"s2", csv({"[ANIMAL]"}), {}, 3}};

    auto diags = validate_rd(rd, ont);
    CHECK(has_errors(diags));
    auto has = [&](Diagnostic::Kind k, const std::string& csv_name, std::size_t idx) {
        return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
            return d.kind == k && d.csv_name == csv_name && d.entry_index == idx && d.resource_id == "r";
        });
    };
    CHECK(has(Diagnostic::Kind::UnknownType, "content", 1));
    CHECK(has(Diagnostic::Kind::UnlicensedAssertion, "prerequisites", 0));
    CHECK(has(Diagnostic::Kind::OntologyMismatch, "ontologie", 0));
    CHECK(has(Diagnostic::Kind::SegmentTimeExceedsResource, "segment", 0));
    CHECK(diags.size() == 4);

    // the warnings alone are not errors
    rd.content = csv({"[PERSON]"});
    rd.prerequisites = {};
    auto warnings = validate_rd(rd, ont);
    CHECK(warnings.size() == 2);
    CHECK_FALSE(has_errors(warnings));
}

TEST_CASE("pedagogic roles") {
    CHECK(PedagogicRole::parse("Explanation") == PedagogicRole::explanation);
    CHECK(PedagogicRole::parse("EXAMPLE") == PedagogicRole::example);
    CHECK(PedagogicRole::parse("drill").kind() == PedagogicRole::Kind::Other);
    CHECK(PedagogicRole::parse("drill").name() == "drill");
    CHECK(PedagogicRole::test.name() == "test");
}

TEST_CASE("decimal formatting") {
    CHECK(format_decimal(15) == "15");
    CHECK(format_decimal(0.8) == "0.8");
    CHECK(format_decimal(2.5) == "2.5");
    CHECK(format_decimal(0.1 + 0.2) == "0.30000000000000004");
}

namespace {

std::string random_type(Rng& rng) {
    static const char* names[] = {"PERSON", "GIRL", "LITTLE_GIRL", "ANIMAL", "CATERPILLAR", "MANNER"};
    return names[uniform_int(rng, 0, 5)];
}

Referent random_referent(Rng& rng) {
    switch (uniform_int(rng, 0, 3)) {
    case 0: return Referent::none();
    case 1: return Referent::generic();
    case 2: return Referent::named("Alice & \"Bob\"");
    default: return Referent::named("x<y>");
    }
}

Csv random_unique_csv(Rng& rng, int lo, int hi) {
    Csv out;
    const int n = uniform_int(rng, lo, hi);
    for (int i = 0; i < n; ++i) {
        std::optional<ConceptTerm> p, d;
        const int arity = uniform_int(rng, 1, 3);
        if (arity >= 2) p = ConceptTerm("LOOK_AT");
        if (arity == 3) d = ConceptTerm(random_type(rng), random_referent(rng));
        out.entries.push_back({KclGraph(ConceptTerm(random_type(rng), random_referent(rng)), p, d),
                               uniform_int(rng, 0, 20) / 20.0});
    }
    return simplify(out);
}

}  // namespace

TEST_CASE("property: serialize then parse is the identity") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        ResourceDescription rd;
        rd.id = "r" + std::to_string(trial);
        rd.uri = "http://example.org/?a=1&b=" + std::to_string(trial);
        rd.title = "T <" + std::to_string(trial) + ">";
        rd.ontology_uri = "urn:o";
        rd.time_value = uniform_int(rng, 0, 1000) / 8.0;
        if (coin(rng)) rd.pedagogic_role = PedagogicRole::parse(coin(rng) ? "example" : "drill");
        if (coin(rng)) rd.media = "video";
        rd.content = random_unique_csv(rng, 1, 6);
        rd.prerequisites = random_unique_csv(rng, 0, 3);
        rd.relations = random_unique_csv(rng, 0, 3);
        for (int s = uniform_int(rng, 0, 2); s > 0; --s) {
            rd.segments.push_back({"seg" + std::to_string(s), random_unique_csv(rng, 1, 3),
                                   random_unique_csv(rng, 0, 2), uniform_int(rng, 0, 40) / 4.0});
        }
        auto text = serialize_rd(rd);
        auto back = parse_rd(text);
        CHECK(back == rd);
        CHECK(serialize_rd(back) == text);
    }
}
