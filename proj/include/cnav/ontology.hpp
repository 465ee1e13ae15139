#pragma once

// Domain ontology: a concept-type hierarchy rooted at the implicit universal
// type `T`, plus relation signatures saying which (source, predicate,
// destination) assertions may be made.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cnav/kcl.hpp"

namespace cnav {

inline constexpr std::string_view kUniversalType = "T";

struct ConceptTypeDecl {
    std::string name;
    std::vector<std::string> parents;  // declaration order; empty means T

    friend bool operator==(const ConceptTypeDecl&, const ConceptTypeDecl&) = default;
};

struct RelationSignature {
    std::string source_type;
    std::string predicate_type;
    std::string destination_type;

    friend bool operator==(const RelationSignature&, const RelationSignature&) = default;
    friend auto operator<=>(const RelationSignature&, const RelationSignature&) = default;
};

struct Diagnostic {
    enum class Kind { UnknownType, UnlicensedAssertion, OntologyMismatch, SegmentTimeExceedsResource };
    enum class Severity { Error, Warning };

    Kind kind;
    Severity severity = Severity::Error;
    std::string resource_id;  // empty for bare graph validation
    std::string csv_name;     // "content", "prerequisites", "relations", "segment:<id>/content", ...
    std::size_t entry_index = 0;
    std::string message;
};

std::string_view to_string(Diagnostic::Kind kind);

class Ontology {
public:
    // Builds and checks an ontology. Throws DanglingReference for unknown
    // parents or signature types, CycleError for subtype cycles and
    // InvariantViolation for duplicate names or signatures.
    Ontology(std::string uri, std::vector<ConceptTypeDecl> types, std::vector<RelationSignature> signatures);
    Ontology() : Ontology("", {}, {}) {}

    const std::string& uri() const noexcept { return uri_; }
    // Declared types in declaration order; the implicit root is not listed.
    const std::vector<ConceptTypeDecl>& types() const noexcept { return decls_; }
    const std::vector<RelationSignature>& signatures() const noexcept { return signatures_; }

    bool has_type(std::string_view name) const;

    // a == b, or b reachable from a through child->parent edges.
    bool is_subtype(std::string_view a, std::string_view b) const;

    // Declared strict subtypes of `name` (not including itself), sorted.
    std::set<std::string> subtypes_of(std::string_view name) const;

    std::set<std::string> valid_predicates(std::string_view source) const;
    std::set<std::string> valid_destinations(std::string_view source, std::string_view predicate) const;
    std::vector<Diagnostic> validate_graph(const KclGraph& g) const;

    // Destinations of signatures (s, relation, d) with source a supertype of
    // `whole`, in declaration order, without repeats.
    std::vector<std::string> decompose(std::string_view whole, std::string_view relation) const;

    friend bool operator==(const Ontology& a, const Ontology& b) {
        return a.uri_ == b.uri_ && a.decls_ == b.decls_ && a.signatures_ == b.signatures_;
    }

private:
    std::size_t index_of(std::string_view name) const;  // throws UnknownType

    std::string uri_;
    std::vector<ConceptTypeDecl> decls_;
    std::vector<RelationSignature> signatures_;

    // index 0 is T; declared types follow in declaration order
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<bool>> ancestors_;  // ancestors_[i][j]: j is a supertype of i (reflexive)
};

// XML document rooted at <ontologie uri="..."> with <concept nom parents?>
// and <relation source predicat destination> children.
Ontology load_ontology(std::string_view xml);

// Line format: `concept NAME [< PARENT ...]`, `relation SRC PRED DST`,
// optional `ontology URI`; `#` starts a comment.
Ontology load_ontology_text(std::string_view text);

// Reads a file in either format, picking XML when the first non-blank
// character is '<'.
Ontology load_ontology_file(const std::string& path);

std::string serialize_ontology(const Ontology& ont);
std::string serialize_ontology_text(const Ontology& ont);

}  // namespace cnav
