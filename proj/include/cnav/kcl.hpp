#pragma once

// Three-term conceptual graphs and weighted sets of them (Conceptual State
// Vectors). Everything here is a plain value; functions are pure.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cnav {

// Referent of a concept term: `[CATERPILLAR : #]` is Generic,
// `[LITTLE_GIRL : Alice]` is Named, `[SILENTLY]` has none.
struct Referent {
    enum class Kind { None, Generic, Named };

    Kind kind = Kind::None;
    std::string name;  // only meaningful for Named

    static Referent none() { return {}; }
    static Referent generic() { return {Kind::Generic, {}}; }
    static Referent named(std::string n);

    bool is_none() const noexcept { return kind == Kind::None; }
    bool is_generic() const noexcept { return kind == Kind::Generic; }
    bool is_named() const noexcept { return kind == Kind::Named; }

    friend bool operator==(const Referent&, const Referent&) = default;
    friend auto operator<=>(const Referent&, const Referent&) = default;
};

// Generic matches anything, Named(x) only Named(x), None matches None or Generic.
bool referents_compatible(const Referent& a, const Referent& b) noexcept;

struct ConceptTerm {
    std::string type_name;
    Referent referent;

    ConceptTerm() = default;
    explicit ConceptTerm(std::string type, Referent ref = {});

    friend bool operator==(const ConceptTerm&, const ConceptTerm&) = default;
    friend auto operator<=>(const ConceptTerm&, const ConceptTerm&) = default;
};

// source [-> predicate [-> destination]]
class KclGraph {
public:
    KclGraph() = default;
    explicit KclGraph(ConceptTerm source,
                      std::optional<ConceptTerm> predicate = std::nullopt,
                      std::optional<ConceptTerm> destination = std::nullopt);

    const ConceptTerm& source() const noexcept { return source_; }
    const std::optional<ConceptTerm>& predicate() const noexcept { return predicate_; }
    const std::optional<ConceptTerm>& destination() const noexcept { return destination_; }

    // Present slots in source, predicate, destination order.
    std::vector<const ConceptTerm*> terms() const;

    friend bool operator==(const KclGraph&, const KclGraph&) = default;
    friend auto operator<=>(const KclGraph&, const KclGraph&) = default;

private:
    ConceptTerm source_;
    std::optional<ConceptTerm> predicate_;
    std::optional<ConceptTerm> destination_;
};

struct WeightedGraph {
    KclGraph graph;
    double weight = 1.0;

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;
};

// Throws InvariantViolation unless 0 <= w <= 1.
void check_weight(double w);

struct ConceptualStateVector {
    std::vector<WeightedGraph> entries;

    ConceptualStateVector() = default;
    ConceptualStateVector(std::initializer_list<WeightedGraph> init) : entries(init) {}
    explicit ConceptualStateVector(std::vector<WeightedGraph> e) : entries(std::move(e)) {}

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }
    bool contains(const KclGraph& g) const;
    double max_weight() const noexcept;

    friend bool operator==(const ConceptualStateVector&, const ConceptualStateVector&) = default;
};

using Csv = ConceptualStateVector;

enum class MatchMode { Strict, Subsume };

// Slot-by-slot "total match": presence patterns must agree, type names must
// be equal and referents compatible.
bool match_strict(const KclGraph& a, const KclGraph& b);

// Collapses structurally identical graphs, keeping the maximum weight at the
// position of the first occurrence.
Csv simplify(const Csv& csv);

// Union of both vectors; identical graphs keep the maximum weight.
Csv merge_into(const Csv& target, const Csv& addition);

// Textual notation used by fixtures, the CLI and diagnostics:
//   [LITTLE_GIRL:Alice]->[LOOK_AT]->[CATERPILLAR:#]
// The unicode arrow is accepted on input as well.
std::string to_string(const ConceptTerm& term);
std::string to_string(const KclGraph& graph);
std::string to_string(const Csv& csv);

ConceptTerm parse_term(std::string_view text);
KclGraph parse_graph(std::string_view text);

}  // namespace cnav
