#pragma once

// Navigation strategies: backward navigation with time-budget backtracking,
// prerequisite ordering, conceptual expansion, forward navigation, template
// instantiation, top-down decomposition and pedagogic-rule ordering.

#include <optional>
#include <string>
#include <vector>

#include "cnav/kcl.hpp"
#include "cnav/ontology.hpp"
#include "cnav/store.hpp"

namespace cnav {

struct LearnerProfile {
    Csv known;
    Csv objective;
    std::optional<double> time_budget;  // minutes; nullopt means unbounded

    bool bounded() const noexcept { return time_budget.has_value(); }
};

// Throws InvalidProfile for a non-positive budget or invalid weights.
void check_profile(const LearnerProfile& profile);

struct Curriculum {
    std::string name;
    std::vector<std::pair<std::string, Csv>> contents;  // (sentence, hidden CSV)

    // merge_into fold of every content CSV. Throws InvariantViolation when empty.
    Csv as_objective() const;
};

struct PlannerConfig {
    int max_backtracks = 100;
    bool backtrack_relaxed = false;
    SelectionUnit selection_unit = SelectionUnit::Resource;
    std::string part_relation = "HAS_PART";
    int expansion_limit = 10;
};

struct PlanStep {
    std::string candidate_id;
    int selection_round = 1;
    double cp_at_selection = 0.0;
    double time_value = 0.0;

    friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

enum class PlanStatus { Complete, Starved, OverBudget };
std::string_view to_string(PlanStatus status);

inline constexpr std::string_view kCyclicPrerequisites = "CyclicPrerequisites";

struct CoursePlan {
    std::vector<PlanStep> steps;  // presentation order
    double total_time = 0.0;
    bool within_budget = true;
    Csv residual_objective;
    PlanStatus status = PlanStatus::Complete;
    std::vector<std::string> warnings;
    int backtracks = 0;  // path revisions performed by backward navigation

    bool contains(std::string_view id) const;
    std::vector<std::string> ids() const;
};

Csv update_objective(const LearnerProfile& profile, const Ontology& ont);

// Throws EmptyObjective, InvalidStore (descriptions using undeclared types).
CoursePlan backward_navigate(const LearnerProfile& profile, const ResourceStore& store, const Ontology& ont,
                             const PlannerConfig& config = {});

struct OrderResult {
    std::vector<PlanStep> steps;
    bool cyclic = false;
};

// Greedy topological order: emit a step whose prerequisites are strictly
// covered by `known` plus what was already emitted; ties by deeper round first
// then id. When nothing is ready the rest follow by descending round.
OrderResult order_by_prerequisites(const std::vector<PlanStep>& steps, const Csv& known, const ResourceStore& store);

// Ranks against the candidate's relations, never listing the candidate (or
// another part of the same resource) nor anything in `exclude`.
// Throws NotFound, NoRelations.
std::vector<RankedCandidate> conceptual_expansion(std::string_view candidate_id, const ResourceStore& store,
                                                  const Ontology& ont, int limit,
                                                  SelectionUnit unit = SelectionUnit::Resource,
                                                  const TagSet& exclude = {});

// Tops up a within-budget plan with expansion material while time remains.
CoursePlan fill_time_gap(const CoursePlan& plan, const LearnerProfile& profile, const ResourceStore& store,
                         const Ontology& ont, const PlannerConfig& config = {});

// Throws NotFound, BudgetTooSmall.
CoursePlan forward_navigate(std::string_view start_id, const ResourceStore& store, const Ontology& ont,
                            double budget, const PlannerConfig& config = {});

// Throws EmptyTemplate.
CoursePlan template_instantiate(const std::vector<Csv>& segments, const LearnerProfile& profile,
                                const ResourceStore& store, const Ontology& ont, const PlannerConfig& config = {});

// Breadth-first decomposition through `part_relation`; every concept appears
// once, the parts of a concept contiguous and in declaration order.
std::vector<std::string> top_down_expand(const std::vector<std::string>& concepts, const Ontology& ont, int depth,
                                         std::string_view part_relation = "HAS_PART");

struct PedagogicRule {
    PedagogicRole before_role;
    PedagogicRole after_role;

    PedagogicRule(PedagogicRole before, PedagogicRole after);  // InvariantViolation if equal
};

// "IF an Explanation and an Example refer to the same topic, THEN the
// Explanation must precede the Example."
PedagogicRule explanation_before_example();

// Content CSVs share a source or destination concept type.
bool same_topic(const Csv& a, const Csv& b);

// Reorders steps so every applicable rule holds, otherwise keeping the
// original order as far as possible. Throws RuleConflict naming the cycle.
CoursePlan apply_pedagogic_rules(const CoursePlan& plan, const std::vector<PedagogicRule>& rules,
                                 const ResourceStore& store);

}  // namespace cnav
