#pragma once

// Resource Descriptions: meta-descriptions kept apart from the resources they
// describe, read from and written to the `materiau` XML format.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnav/kcl.hpp"
#include "cnav/ontology.hpp"

namespace cnav {

class PedagogicRole {
public:
    enum class Kind { Exposure, Example, Explanation, Test, Other };

    PedagogicRole() = default;
    // Known names are matched case-insensitively; anything else is Other.
    static PedagogicRole parse(std::string_view name);
    static PedagogicRole other(std::string name);

    Kind kind() const noexcept { return kind_; }
    // Canonical lower-case name for known kinds, the stored text for Other.
    std::string name() const;

    friend bool operator==(const PedagogicRole&, const PedagogicRole&) = default;

    static const PedagogicRole exposure;
    static const PedagogicRole example;
    static const PedagogicRole explanation;
    static const PedagogicRole test;

private:
    PedagogicRole(Kind k, std::string other) : kind_(k), other_(std::move(other)) {}

    Kind kind_ = Kind::Other;
    std::string other_;
};

struct Segment {
    std::string id;
    Csv content;
    Csv relations;
    double time_value = 0.0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct ResourceDescription {
    std::string id;
    std::string uri;
    std::string title;
    Csv content;        // description_conceptuelle
    Csv prerequisites;  // pre_requis
    Csv relations;      // relation_conceptuelle
    std::string ontology_uri;
    double time_value = 0.0;  // minutes
    std::optional<PedagogicRole> pedagogic_role;
    std::optional<std::string> media;
    std::vector<Segment> segments;

    friend bool operator==(const ResourceDescription&, const ResourceDescription&) = default;
};

// Throws InvariantViolation when a description breaks a structural rule:
// empty content, negative time, weights outside [0,1], duplicate segment ids,
// duplicate graphs in a vector, or a predicate term carrying a referent.
void check_invariants(const ResourceDescription& rd);

ResourceDescription parse_rd(std::string_view document);

// Canonical form: fixed element and attribute order, two-space indentation,
// `poids` omitted for weight 1, empty optional vectors omitted.
std::string serialize_rd(const ResourceDescription& rd);

// Checks every graph against the ontology. Never throws on content problems.
std::vector<Diagnostic> validate_rd(const ResourceDescription& rd, const Ontology& ont);

bool has_errors(const std::vector<Diagnostic>& diags);

// Shortest decimal form that reads back to the same double.
std::string format_decimal(double v);

}  // namespace cnav
