#include "cnav/kcl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "cnav/error.hpp"

namespace cnav {

namespace {

bool valid_type_name(std::string_view name) {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isspace(c) || c == '[' || c == ']' || c == ':';
    });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Referent Referent::named(std::string n) {
    if (n.empty()) throw Error(ErrorCode::InvariantViolation, "named referent must be non-empty");
    return {Kind::Named, std::move(n)};
}

bool referents_compatible(const Referent& a, const Referent& b) noexcept {
    if (a.is_generic() || b.is_generic()) return true;
    if (a.is_none() || b.is_none()) return a.is_none() && b.is_none();
    return a.name == b.name;
}

ConceptTerm::ConceptTerm(std::string type, Referent ref) : type_name(std::move(type)), referent(std::move(ref)) {
    if (!valid_type_name(type_name)) {
        throw Error(ErrorCode::InvariantViolation, "invalid concept type name '" + type_name + "'");
    }
    if (referent.is_named() && referent.name.empty()) {
        throw Error(ErrorCode::InvariantViolation, "named referent must be non-empty");
    }
}

KclGraph::KclGraph(ConceptTerm source, std::optional<ConceptTerm> predicate,
                   std::optional<ConceptTerm> destination)
    : source_(std::move(source)), predicate_(std::move(predicate)), destination_(std::move(destination)) {
    if (source_.type_name.empty()) {
        throw Error(ErrorCode::InvariantViolation, "graph source is required");
    }
    if (destination_ && !predicate_) {
        throw Error(ErrorCode::InvariantViolation,
                    "graph with a destination needs a predicate: " + source_.type_name);
    }
}

std::vector<const ConceptTerm*> KclGraph::terms() const {
    std::vector<const ConceptTerm*> out{&source_};
    if (predicate_) out.push_back(&*predicate_);
    if (destination_) out.push_back(&*destination_);
    return out;
}

void check_weight(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw Error(ErrorCode::InvariantViolation, "weight must lie in [0,1], got " + std::to_string(w));
    }
}

bool ConceptualStateVector::contains(const KclGraph& g) const {
    return std::any_of(entries.begin(), entries.end(), [&](const WeightedGraph& e) { return e.graph == g; });
}

double ConceptualStateVector::max_weight() const noexcept {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.weight);
    return m;
}

namespace {

bool terms_match_strict(const ConceptTerm& a, const ConceptTerm& b) {
    return a.type_name == b.type_name && referents_compatible(a.referent, b.referent);
}

bool optional_terms_match_strict(const std::optional<ConceptTerm>& a, const std::optional<ConceptTerm>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || terms_match_strict(*a, *b);
}

}  // namespace

bool match_strict(const KclGraph& a, const KclGraph& b) {
    return terms_match_strict(a.source(), b.source()) &&
           optional_terms_match_strict(a.predicate(), b.predicate()) &&
           optional_terms_match_strict(a.destination(), b.destination());
}

Csv simplify(const Csv& csv) {
    Csv out;
    out.entries.reserve(csv.entries.size());
    std::map<KclGraph, std::size_t> seen;
    for (const auto& e : csv.entries) {
        auto [it, inserted] = seen.try_emplace(e.graph, out.entries.size());
        if (inserted) {
            out.entries.push_back(e);
        } else {
            auto& kept = out.entries[it->second];
            kept.weight = std::max(kept.weight, e.weight);
        }
    }
    return out;
}

Csv merge_into(const Csv& target, const Csv& addition) {
    Csv all = target;
    all.entries.insert(all.entries.end(), addition.entries.begin(), addition.entries.end());
    return simplify(all);
}

std::string to_string(const ConceptTerm& term) {
    std::string out = "[" + term.type_name;
    if (term.referent.is_generic()) {
        out += ":#";
    } else if (term.referent.is_named()) {
        out += ":" + term.referent.name;
    }
    return out + "]";
}

std::string to_string(const KclGraph& graph) {
    std::string out = to_string(graph.source());
    if (graph.predicate()) out += "->" + to_string(*graph.predicate());
    if (graph.destination()) out += "->" + to_string(*graph.destination());
    return out;
}

std::string to_string(const Csv& csv) {
    std::string out = "{";
    for (std::size_t i = 0; i < csv.entries.size(); ++i) {
        if (i) out += ", ";
        out += "(" + to_string(csv.entries[i].graph) + ", " + std::to_string(csv.entries[i].weight) + ")";
    }
    return out + "}";
}

ConceptTerm parse_term(std::string_view text) {
    auto t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
        throw Error(ErrorCode::ParseError, "concept term must be bracketed: '" + std::string(text) + "'");
    }
    t = t.substr(1, t.size() - 2);
    auto colon = t.find(':');
    auto type = trim(t.substr(0, colon));
    if (!valid_type_name(type)) {
        throw Error(ErrorCode::ParseError, "bad concept type in '" + std::string(text) + "'");
    }
    Referent ref;
    if (colon != std::string_view::npos) {
        auto r = trim(t.substr(colon + 1));
        if (r.empty()) throw Error(ErrorCode::ParseError, "empty referent in '" + std::string(text) + "'");
        ref = r == "#" ? Referent::generic() : Referent::named(std::string(r));
    }
    return ConceptTerm(std::string(type), std::move(ref));
}

KclGraph parse_graph(std::string_view text) {
    std::string s(text);
    // normalise the unicode arrow (U+2192) to "->"
    for (std::size_t pos; (pos = s.find("\xE2\x86\x92")) != std::string::npos;) s.replace(pos, 3, "->");

    std::vector<std::string_view> parts;
    std::string_view rest(s);
    for (std::size_t pos; (pos = rest.find("->")) != std::string_view::npos;) {
        parts.push_back(rest.substr(0, pos));
        rest.remove_prefix(pos + 2);
    }
    parts.push_back(rest);
    if (parts.size() > 3) {
        throw Error(ErrorCode::ParseError, "a graph holds at most three terms: '" + std::string(text) + "'");
    }
    auto source = parse_term(parts[0]);
    std::optional<ConceptTerm> predicate, destination;
    if (parts.size() > 1) predicate = parse_term(parts[1]);
    if (parts.size() > 2) destination = parse_term(parts[2]);
    return KclGraph(std::move(source), std::move(predicate), std::move(destination));
}

}  // namespace cnav
