#include "cnav/proximity.hpp"

#include <algorithm>

#include "cnav/error.hpp"

namespace cnav {

namespace {

void require_declared(const KclGraph& g, const Ontology& ont) {
    for (const auto* t : g.terms()) {
        if (!ont.has_type(t->type_name)) {
            throw Error(ErrorCode::UnknownType, "unknown concept type '" + t->type_name + "' in " + to_string(g));
        }
    }
}

bool slot_subsumed(const std::optional<ConceptTerm>& general, const std::optional<ConceptTerm>& specific,
                   const Ontology& ont) {
    if (general.has_value() != specific.has_value()) return false;
    if (!general) return true;
    return ont.is_subtype(specific->type_name, general->type_name) &&
           referents_compatible(general->referent, specific->referent);
}

}  // namespace

bool match_subsume(const KclGraph& objective, const KclGraph& candidate, const Ontology& ont) {
    require_declared(objective, ont);
    require_declared(candidate, ont);
    return slot_subsumed(objective.source(), candidate.source(), ont) &&
           slot_subsumed(objective.predicate(), candidate.predicate(), ont) &&
           slot_subsumed(objective.destination(), candidate.destination(), ont);
}

bool matches(const KclGraph& objective, const KclGraph& candidate, MatchMode mode, const Ontology& ont) {
    return mode == MatchMode::Strict ? match_strict(objective, candidate) : match_subsume(objective, candidate, ont);
}

Csv withdraw(const Csv& a, const Csv& b, MatchMode mode, const Ontology& ont) {
    Csv out;
    for (const auto& e : a.entries) {
        bool hit = std::any_of(b.entries.begin(), b.entries.end(),
                               [&](const WeightedGraph& k) { return matches(e.graph, k.graph, mode, ont); });
        if (!hit) out.entries.push_back(e);
    }
    return out;
}

Csv withdraw_strict(const Csv& a, const Csv& b) {
    Csv out;
    for (const auto& e : a.entries) {
        bool hit = std::any_of(b.entries.begin(), b.entries.end(),
                               [&](const WeightedGraph& k) { return match_strict(e.graph, k.graph); });
        if (!hit) out.entries.push_back(e);
    }
    return out;
}

double conceptual_proximity(const Csv& objective, const Csv& resource, const Ontology& ont) {
    if (objective.empty()) throw Error(ErrorCode::EmptyObjective, "conceptual proximity needs a non-empty objective");

    double total = 0.0;
    for (const auto& g : objective.entries) total += g.weight;
    const bool uniform = total <= 0.0;
    if (uniform) total = static_cast<double>(objective.size());

    double covered = 0.0;
    for (const auto& g : objective.entries) {
        double best = 0.0;
        for (const auto& h : resource.entries) {
            if (h.weight > best && match_subsume(g.graph, h.graph, ont)) best = h.weight;
        }
        covered += (uniform ? 1.0 : g.weight) * best;
    }
    return covered / total;
}

bool covers(const Csv& objective, const Csv& knowledge) { return withdraw_strict(objective, knowledge).empty(); }

}  // namespace cnav
