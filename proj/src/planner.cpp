#include "cnav/planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "cnav/error.hpp"
#include "cnav/proximity.hpp"

namespace cnav {

std::string_view to_string(PlanStatus status) {
    switch (status) {
    case PlanStatus::Complete: return "Complete";
    case PlanStatus::Starved: return "Starved";
    case PlanStatus::OverBudget: return "OverBudget";
    }
    return "Unknown";
}

void check_profile(const LearnerProfile& profile) {
    if (profile.time_budget && !(*profile.time_budget > 0.0)) {
        throw Error(ErrorCode::InvalidProfile, "time budget must be positive when bounded");
    }
    for (const auto* csv : {&profile.known, &profile.objective}) {
        for (const auto& e : csv->entries) {
            if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
                throw Error(ErrorCode::InvalidProfile, "profile weight outside [0,1] on " + to_string(e.graph));
            }
        }
    }
}

Csv Curriculum::as_objective() const {
    if (contents.empty()) throw Error(ErrorCode::InvariantViolation, "curriculum '" + name + "' has no contents");
    Csv out;
    for (const auto& [label, csv] : contents) out = merge_into(out, csv);
    return out;
}

bool CoursePlan::contains(std::string_view id) const {
    return std::any_of(steps.begin(), steps.end(), [&](const PlanStep& s) { return s.candidate_id == id; });
}

std::vector<std::string> CoursePlan::ids() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.push_back(s.candidate_id);
    return out;
}

Csv update_objective(const LearnerProfile& profile, const Ontology& ont) {
    return withdraw(profile.objective, profile.known, MatchMode::Strict, ont);
}

namespace {

double sum_time(const std::vector<PlanStep>& steps) {
    double t = 0.0;
    for (const auto& s : steps) t += s.time_value;
    return t;
}

void require_valid_store(const ResourceStore& store, const Ontology& ont) {
    for (const auto& d : validate_store(store, ont)) {
        if (d.kind == Diagnostic::Kind::UnknownType) {
            throw Error(ErrorCode::InvalidStore, d.resource_id + " " + d.csv_name + "[" +
                                                     std::to_string(d.entry_index) + "]: " + d.message);
        }
    }
}

// Working state of one backward-navigation path.
struct WorkState {
    Csv objective;
    Csv knowledge;
    TagSet tags;
};

struct Round {
    WorkState before;
    std::vector<RankedCandidate> ranking;
    std::size_t chosen = 0;
    std::set<std::size_t> tried;
};

class BackwardSearch {
public:
    BackwardSearch(const ResourceStore& store, const Ontology& ont, const PlannerConfig& config)
        : store_(store), ont_(ont), config_(config) {}

    // Runs greedy selection from `state` until the objective is empty or no
    // candidate matches. Returns true when the path starved.
    bool extend(std::vector<Round>& rounds, WorkState state) {
        while (!state.objective.empty()) {
            auto ranking = rank_by_cp(store_, state.objective, ont_, config_.selection_unit, state.tags);
            if (ranking.empty()) {
                final_state_ = std::move(state);
                return true;
            }
            Round r{state, std::move(ranking), 0, {0}};
            select(state, r.ranking.front().id);
            rounds.push_back(std::move(r));
        }
        final_state_ = std::move(state);
        return false;
    }

    void select(WorkState& state, const std::string& id) const {
        const auto c = store_.candidate(id);
        state.objective = withdraw_strict(state.objective, c.content());
        state.knowledge = merge_into(state.knowledge, c.content());
        Csv missing;
        for (const auto& p : c.prerequisites().entries) {
            bool known = std::any_of(state.knowledge.entries.begin(), state.knowledge.entries.end(),
                                     [&](const WeightedGraph& k) { return match_strict(p.graph, k.graph); });
            if (!known) missing.entries.push_back(p);
        }
        state.objective = merge_into(state.objective, missing);
        state.tags.insert(id);
    }

    // Chronological backtracking: the latest round with an eligible untried
    // alternate is reset to that alternate. Returns false when none is left.
    bool backtrack(std::vector<Round>& rounds) {
        for (std::size_t k = rounds.size(); k-- > 0;) {
            auto& r = rounds[k];
            const double original_time = r.ranking.front().time_value;
            for (std::size_t j = 0; j < r.ranking.size(); ++j) {
                if (r.tried.count(j)) continue;
                if (!config_.backtrack_relaxed && !(r.ranking[j].time_value < original_time)) continue;
                r.tried.insert(j);
                r.chosen = j;
                rounds.resize(k + 1);
                WorkState state = rounds[k].before;
                select(state, rounds[k].ranking[j].id);
                starved_ = extend(rounds, std::move(state));
                return true;
            }
        }
        return false;
    }

    bool starved_ = false;
    WorkState final_state_;

private:
    const ResourceStore& store_;
    const Ontology& ont_;
    const PlannerConfig& config_;
};

std::vector<PlanStep> steps_of(const std::vector<Round>& rounds) {
    std::vector<PlanStep> steps;
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        const auto& pick = rounds[i].ranking[rounds[i].chosen];
        steps.push_back({pick.id, static_cast<int>(i + 1), pick.cp, pick.time_value});
    }
    return steps;
}

}  // namespace

CoursePlan backward_navigate(const LearnerProfile& profile, const ResourceStore& store, const Ontology& ont,
                             const PlannerConfig& config) {
    if (profile.objective.empty()) throw Error(ErrorCode::EmptyObjective, "learner objective is empty");
    check_profile(profile);
    require_valid_store(store, ont);

    BackwardSearch search(store, ont, config);
    WorkState start{update_objective(profile, ont), profile.known, {}};
    std::vector<Round> rounds;
    search.starved_ = search.extend(rounds, start);

    auto finish = [&](std::vector<PlanStep> selected, bool starved, const Csv& residual, int backtracks) {
        CoursePlan plan;
        auto ordered = order_by_prerequisites(selected, profile.known, store);
        plan.steps = std::move(ordered.steps);
        if (ordered.cyclic) plan.warnings.emplace_back(kCyclicPrerequisites);
        plan.total_time = sum_time(plan.steps);
        plan.within_budget = !profile.bounded() || plan.total_time <= *profile.time_budget;
        plan.status = starved ? PlanStatus::Starved : PlanStatus::Complete;
        if (starved) plan.residual_objective = residual;
        plan.backtracks = backtracks;
        return plan;
    };

    auto initial_steps = steps_of(rounds);
    const bool initial_starved = search.starved_;
    const Csv initial_residual = search.final_state_.objective;
    const double initial_time = sum_time(initial_steps);

    if (!profile.bounded() || initial_time <= *profile.time_budget) {
        return finish(initial_steps, initial_starved, initial_residual, 0);
    }

    // Over budget: revise the path. The shortest complete path seen so far is
    // the fallback when no revision fits.
    std::optional<std::vector<PlanStep>> shortest;
    if (!initial_starved) shortest = initial_steps;
    int backtracks = 0;
    while (backtracks < config.max_backtracks && search.backtrack(rounds)) {
        ++backtracks;
        auto steps = steps_of(rounds);
        if (search.starved_) continue;
        const double t = sum_time(steps);
        if (t <= *profile.time_budget) return finish(steps, false, {}, backtracks);
        if (!shortest || t < sum_time(*shortest)) shortest = steps;
    }
    if (shortest) {
        auto plan = finish(*shortest, false, {}, backtracks);
        plan.status = PlanStatus::OverBudget;
        return plan;
    }
    return finish(initial_steps, initial_starved, initial_residual, backtracks);
}

OrderResult order_by_prerequisites(const std::vector<PlanStep>& steps, const Csv& known, const ResourceStore& store) {
    OrderResult out;
    Csv knowledge = known;
    std::vector<PlanStep> remaining = steps;
    auto deeper_first = [](const PlanStep& a, const PlanStep& b) {
        if (a.selection_round != b.selection_round) return a.selection_round > b.selection_round;
        return a.candidate_id < b.candidate_id;
    };
    while (!remaining.empty()) {
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            if (!covers(store.candidate(remaining[i].candidate_id).prerequisites(), knowledge)) continue;
            if (!pick || deeper_first(remaining[i], remaining[*pick])) pick = i;
        }
        if (!pick) {
            out.cyclic = true;
            std::sort(remaining.begin(), remaining.end(), deeper_first);
            out.steps.insert(out.steps.end(), remaining.begin(), remaining.end());
            break;
        }
        knowledge = merge_into(knowledge, store.candidate(remaining[*pick].candidate_id).content());
        out.steps.push_back(remaining[*pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(*pick));
    }
    return out;
}

std::vector<RankedCandidate> conceptual_expansion(std::string_view candidate_id, const ResourceStore& store,
                                                  const Ontology& ont, int limit, SelectionUnit unit,
                                                  const TagSet& exclude) {
    const auto c = store.candidate(candidate_id);
    if (c.relations().empty()) {
        throw Error(ErrorCode::NoRelations, "'" + std::string(candidate_id) + "' has no relation_conceptuelle");
    }
    TagSet overlay = exclude;
    overlay.insert(c.resource->id);
    auto ranked = rank_by_cp(store, c.relations(), ont, unit, overlay);
    if (limit >= 0 && ranked.size() > static_cast<std::size_t>(limit)) ranked.resize(static_cast<std::size_t>(limit));
    return ranked;
}

CoursePlan fill_time_gap(const CoursePlan& plan, const LearnerProfile& profile, const ResourceStore& store,
                         const Ontology& ont, const PlannerConfig& config) {
    if (!profile.bounded() || !plan.within_budget || plan.steps.empty()) return plan;
    const double budget = *profile.time_budget;

    CoursePlan out = plan;
    TagSet in_plan;
    Csv knowledge = profile.known;
    int round = 0;
    for (const auto& s : out.steps) {
        in_plan.insert(s.candidate_id);
        knowledge = merge_into(knowledge, store.candidate(s.candidate_id).content());
        round = std::max(round, s.selection_round);
    }

    for (;;) {
        const double remaining = budget - out.total_time;
        double smallest = std::numeric_limits<double>::infinity();
        for (const auto& c : store.candidates(config.selection_unit)) {
            if (!in_plan.count(c.id) && !store.is_tagged(c.id)) smallest = std::min(smallest, c.time_value());
        }
        if (!(remaining >= smallest)) break;

        std::vector<RankedCandidate> expansion;
        try {
            expansion = conceptual_expansion(out.steps.back().candidate_id, store, ont, config.expansion_limit,
                                             config.selection_unit, in_plan);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRelations) throw;
            break;
        }
        // Material whose content the learner already has would add nothing.
        auto fit = std::find_if(expansion.begin(), expansion.end(), [&](const RankedCandidate& r) {
            return r.time_value <= remaining && !covers(store.candidate(r.id).content(), knowledge);
        });
        if (fit == expansion.end()) break;

        out.steps.push_back({fit->id, ++round, fit->cp, fit->time_value});
        out.total_time += fit->time_value;
        in_plan.insert(fit->id);
        knowledge = merge_into(knowledge, store.candidate(fit->id).content());
    }
    out.within_budget = out.total_time <= budget;
    return out;
}

CoursePlan forward_navigate(std::string_view start_id, const ResourceStore& store, const Ontology& ont, double budget,
                            const PlannerConfig& config) {
    const auto start = store.candidate(start_id);
    if (!(budget > 0.0)) throw Error(ErrorCode::InvalidProfile, "forward navigation needs a positive time budget");
    if (start.time_value() > budget) {
        throw Error(ErrorCode::BudgetTooSmall, "'" + start.id + "' alone takes " + format_decimal(start.time_value()) +
                                                   " min, budget is " + format_decimal(budget));
    }

    CoursePlan plan;
    plan.steps.push_back({start.id, 1, 1.0, start.time_value()});
    plan.total_time = start.time_value();
    TagSet visited{start.id};

    for (;;) {
        std::vector<RankedCandidate> expansion;
        try {
            expansion = conceptual_expansion(plan.steps.back().candidate_id, store, ont, config.expansion_limit,
                                             config.selection_unit, visited);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRelations) throw;
        }
        if (expansion.empty()) {
            plan.status = PlanStatus::Starved;
            break;
        }
        const double remaining = budget - plan.total_time;
        auto fit = std::find_if(expansion.begin(), expansion.end(),
                                [&](const RankedCandidate& r) { return r.time_value <= remaining; });
        if (fit == expansion.end()) break;  // time constraint reached
        plan.steps.push_back({fit->id, static_cast<int>(plan.steps.size()) + 1, fit->cp, fit->time_value});
        plan.total_time += fit->time_value;
        visited.insert(fit->id);
    }
    plan.within_budget = plan.total_time <= budget;
    return plan;
}

CoursePlan template_instantiate(const std::vector<Csv>& segments, const LearnerProfile& profile,
                                const ResourceStore& store, const Ontology& ont, const PlannerConfig& config) {
    if (segments.empty()) throw Error(ErrorCode::EmptyTemplate, "template has no segments");
    check_profile(profile);

    CoursePlan plan;
    Csv accumulated = profile.known;
    TagSet tags;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto label = "segment " + std::to_string(i + 1);
        auto residual = withdraw_strict(segments[i], accumulated);
        if (residual.empty()) {
            plan.warnings.push_back(label + " already covered");
            continue;
        }
        auto ranking = rank_by_cp(store, residual, ont, config.selection_unit, tags);
        auto fit = std::find_if(ranking.begin(), ranking.end(), [&](const RankedCandidate& r) {
            return !profile.bounded() || plan.total_time + r.time_value <= *profile.time_budget;
        });
        if (fit == ranking.end()) {
            plan.warnings.push_back(label + " unmatched");
            plan.residual_objective = merge_into(plan.residual_objective, residual);
            plan.status = PlanStatus::Starved;
            continue;
        }
        plan.steps.push_back({fit->id, static_cast<int>(i + 1), fit->cp, fit->time_value});
        plan.total_time += fit->time_value;
        accumulated = merge_into(accumulated, store.candidate(fit->id).content());
        tags.insert(fit->id);
    }
    plan.within_budget = !profile.bounded() || plan.total_time <= *profile.time_budget;
    return plan;
}

std::vector<std::string> top_down_expand(const std::vector<std::string>& concepts, const Ontology& ont, int depth,
                                         std::string_view part_relation) {
    for (const auto& c : concepts) {
        if (!ont.has_type(c)) throw Error(ErrorCode::UnknownType, "unknown concept type '" + c + "'");
    }
    const bool has_parts = ont.has_type(part_relation);
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& root : concepts) {
        if (!seen.insert(root).second) continue;
        out.push_back(root);
        std::vector<std::string> level{root};
        for (int d = 0; d < depth && has_parts && !level.empty(); ++d) {
            std::vector<std::string> next;
            for (const auto& c : level) {
                for (auto& part : ont.decompose(c, part_relation)) {
                    if (!seen.insert(part).second) continue;
                    out.push_back(part);
                    next.push_back(std::move(part));
                }
            }
            level = std::move(next);
        }
    }
    return out;
}

PedagogicRule::PedagogicRule(PedagogicRole before, PedagogicRole after)
    : before_role(std::move(before)), after_role(std::move(after)) {
    if (before_role == after_role) {
        throw Error(ErrorCode::InvariantViolation, "a pedagogic rule needs two different roles");
    }
}

PedagogicRule explanation_before_example() { return {PedagogicRole::explanation, PedagogicRole::example}; }

bool same_topic(const Csv& a, const Csv& b) {
    auto topics = [](const Csv& csv) {
        std::set<std::string> out;
        for (const auto& e : csv.entries) {
            out.insert(e.graph.source().type_name);
            if (e.graph.destination()) out.insert(e.graph.destination()->type_name);
        }
        return out;
    };
    auto ta = topics(a);
    auto tb = topics(b);
    return std::any_of(ta.begin(), ta.end(), [&](const std::string& t) { return tb.count(t) > 0; });
}

CoursePlan apply_pedagogic_rules(const CoursePlan& plan, const std::vector<PedagogicRule>& rules,
                                 const ResourceStore& store) {
    const std::size_t n = plan.steps.size();
    std::vector<Candidate> cands;
    for (const auto& s : plan.steps) cands.push_back(store.candidate(s.candidate_id));

    std::vector<std::set<std::size_t>> succ(n);
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& rule : rules) {
        for (std::size_t x = 0; x < n; ++x) {
            if (cands[x].role() != rule.before_role) continue;
            for (std::size_t y = 0; y < n; ++y) {
                if (x == y || cands[y].role() != rule.after_role) continue;
                if (!same_topic(cands[x].content(), cands[y].content())) continue;
                if (succ[x].insert(y).second) ++indegree[y];
            }
        }
    }

    // Kahn's algorithm always releasing the earliest original position.
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto j : succ[i]) {
            if (--indegree[j] == 0) ready.insert(j);
        }
    }

    if (order.size() != n) {
        std::vector<bool> done(n, false);
        for (auto i : order) done[i] = true;
        // Every unreleased step has an unreleased predecessor; walking
        // predecessors must revisit a step, which closes the cycle.
        std::vector<std::vector<std::size_t>> pred(n);
        for (std::size_t x = 0; x < n; ++x) {
            for (auto y : succ[x]) pred[y].push_back(x);
        }
        std::size_t cur = 0;
        while (done[cur]) ++cur;
        std::vector<std::size_t> walk;
        std::vector<int> pos(n, -1);
        while (pos[cur] < 0) {
            pos[cur] = static_cast<int>(walk.size());
            walk.push_back(cur);
            cur = *std::find_if(pred[cur].begin(), pred[cur].end(), [&](std::size_t p) { return !done[p]; });
        }
        std::vector<std::string> cycle;
        for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
            cycle.push_back(plan.steps[*it].candidate_id);
            if (*it == cur) break;
        }
        std::string desc;
        for (const auto& id : cycle) desc += id + " -> ";
        throw Error(ErrorCode::RuleConflict, "pedagogic rules form a cycle: " + desc + cycle.front(), cycle);
    }

    CoursePlan out = plan;
    out.steps.clear();
    for (auto i : order) out.steps.push_back(plan.steps[i]);
    return out;
}

}  // namespace cnav
