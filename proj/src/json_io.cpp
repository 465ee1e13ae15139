#include "cnav/json_io.hpp"

#include "cnav/error.hpp"

namespace cnav {

namespace {

std::string ref_to_string(const Referent& r) { return r.is_generic() ? "#" : r.name; }

Referent ref_from(const json& obj, const char* key) {
    if (!obj.contains(key) || obj[key].is_null()) return Referent::none();
    auto s = obj[key].get<std::string>();
    return s == "#" ? Referent::generic() : Referent::named(s);
}

const json& require(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorCode::ParseError, std::string(what) + " lacks '" + key + "'");
    }
    return j[key];
}

PlanStatus status_from(const std::string& s) {
    if (s == "Complete") return PlanStatus::Complete;
    if (s == "Starved") return PlanStatus::Starved;
    if (s == "OverBudget") return PlanStatus::OverBudget;
    throw Error(ErrorCode::ParseError, "unknown plan status '" + s + "'");
}

template <class F>
auto wrap_json_errors(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace

json csv_to_json(const Csv& csv) {
    json arr = json::array();
    for (const auto& e : csv.entries) {
        const auto& g = e.graph;
        json o{{"source", g.source().type_name}};
        if (!g.source().referent.is_none()) o["source_ref"] = ref_to_string(g.source().referent);
        if (g.predicate()) o["predicate"] = g.predicate()->type_name;
        if (g.destination()) {
            o["destination"] = g.destination()->type_name;
            if (!g.destination()->referent.is_none()) o["destination_ref"] = ref_to_string(g.destination()->referent);
        }
        if (e.weight != 1.0) o["weight"] = e.weight;
        arr.push_back(std::move(o));
    }
    return arr;
}

Csv csv_from_json(const json& j) {
    return wrap_json_errors([&] {
        if (!j.is_array()) throw Error(ErrorCode::ParseError, "a CSV must be a JSON array");
        Csv csv;
        for (const auto& o : j) {
            ConceptTerm src(require(o, "source", "CSV entry").get<std::string>(), ref_from(o, "source_ref"));
            std::optional<ConceptTerm> pred, dest;
            if (o.contains("predicate") && !o["predicate"].is_null()) pred = ConceptTerm(o["predicate"].get<std::string>());
            if (o.contains("destination") && !o["destination"].is_null()) {
                dest = ConceptTerm(o["destination"].get<std::string>(), ref_from(o, "destination_ref"));
            }
            double w = o.value("weight", 1.0);
            check_weight(w);
            csv.entries.push_back({KclGraph(std::move(src), std::move(pred), std::move(dest)), w});
        }
        return simplify(csv);
    });
}

json profile_to_json(const LearnerProfile& p) {
    return {{"known", csv_to_json(p.known)},
            {"objective", csv_to_json(p.objective)},
            {"time_budget", p.time_budget ? json(*p.time_budget) : json(nullptr)}};
}

LearnerProfile profile_from_json(const json& j) {
    return wrap_json_errors([&] {
        if (!j.is_object()) throw Error(ErrorCode::InvalidProfile, "profile must be a JSON object");
        LearnerProfile p;
        if (j.contains("known")) p.known = csv_from_json(j["known"]);
        if (!j.contains("objective")) throw Error(ErrorCode::InvalidProfile, "profile lacks 'objective'");
        const auto& obj = j["objective"];
        if (obj.is_object()) {
            Curriculum cur;
            cur.name = obj.value("name", "");
            for (const auto& c : require(obj, "contents", "curriculum")) {
                cur.contents.emplace_back(c.value("label", ""), csv_from_json(require(c, "csv", "curriculum content")));
            }
            p.objective = cur.as_objective();
        } else {
            p.objective = csv_from_json(obj);
        }
        if (j.contains("time_budget") && !j["time_budget"].is_null()) p.time_budget = j["time_budget"].get<double>();
        check_profile(p);
        return p;
    });
}

json plan_to_json(const CoursePlan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) {
        steps.push_back({{"id", s.candidate_id},
                         {"round", s.selection_round},
                         {"cp", s.cp_at_selection},
                         {"time", s.time_value}});
    }
    return {{"steps", std::move(steps)},
            {"total_time", plan.total_time},
            {"within_budget", plan.within_budget},
            {"status", std::string(to_string(plan.status))},
            {"residual_objective", csv_to_json(plan.residual_objective)},
            {"warnings", plan.warnings},
            {"backtracks", plan.backtracks}};
}

CoursePlan plan_from_json(const json& j) {
    return wrap_json_errors([&] {
        CoursePlan plan;
        for (const auto& s : require(j, "steps", "plan")) {
            plan.steps.push_back({s.at("id").get<std::string>(), s.at("round").get<int>(), s.at("cp").get<double>(),
                                  s.at("time").get<double>()});
        }
        plan.total_time = j.at("total_time").get<double>();
        plan.within_budget = j.at("within_budget").get<bool>();
        plan.status = status_from(j.at("status").get<std::string>());
        plan.residual_objective = csv_from_json(j.at("residual_objective"));
        plan.warnings = j.value("warnings", std::vector<std::string>{});
        plan.backtracks = j.value("backtracks", 0);
        return plan;
    });
}

json ranked_to_json(const std::vector<RankedCandidate>& ranked) {
    json arr = json::array();
    for (const auto& r : ranked) arr.push_back({{"id", r.id}, {"cp", r.cp}, {"time", r.time_value}});
    return arr;
}

PlannerConfig config_from_json(const json& j, PlannerConfig base) {
    return wrap_json_errors([&] {
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "planner configuration must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "max_backtracks") {
                base.max_backtracks = value.get<int>();
            } else if (key == "backtrack_relaxed") {
                base.backtrack_relaxed = value.get<bool>();
            } else if (key == "selection_unit") {
                base.selection_unit = parse_selection_unit(value.get<std::string>());
            } else if (key == "part_relation") {
                base.part_relation = value.get<std::string>();
            } else if (key == "expansion_limit") {
                base.expansion_limit = value.get<int>();
            } else {
                throw Error(ErrorCode::ParseError, "unknown planner option '" + key + "'");
            }
        }
        if (base.max_backtracks < 0) throw Error(ErrorCode::ParseError, "max_backtracks must be >= 0");
        return base;
    });
}

json config_to_json(const PlannerConfig& c) {
    return {{"max_backtracks", c.max_backtracks},
            {"backtrack_relaxed", c.backtrack_relaxed},
            {"selection_unit", std::string(to_string(c.selection_unit))},
            {"part_relation", c.part_relation},
            {"expansion_limit", c.expansion_limit}};
}

json rd_summary_to_json(const ResourceDescription& rd) {
    json o{{"id", rd.id}, {"title", rd.title}, {"uri", rd.uri}, {"time", rd.time_value}};
    if (rd.pedagogic_role) o["role"] = rd.pedagogic_role->name();
    if (rd.media) o["media"] = *rd.media;
    json segs = json::array();
    for (const auto& s : rd.segments) segs.push_back(s.id);
    o["segments"] = std::move(segs);
    return o;
}

json rd_to_json(const ResourceDescription& rd) {
    json o = rd_summary_to_json(rd);
    o["ontology"] = rd.ontology_uri;
    o["content"] = csv_to_json(rd.content);
    o["prerequisites"] = csv_to_json(rd.prerequisites);
    o["relations"] = csv_to_json(rd.relations);
    json segs = json::array();
    for (const auto& s : rd.segments) {
        segs.push_back({{"id", s.id},
                        {"time", s.time_value},
                        {"content", csv_to_json(s.content)},
                        {"relations", csv_to_json(s.relations)}});
    }
    o["segments"] = std::move(segs);
    return o;
}

json ontology_to_json(const Ontology& ont) {
    json types = json::array();
    for (const auto& t : ont.types()) types.push_back({{"name", t.name}, {"parents", t.parents}});
    json sigs = json::array();
    for (const auto& s : ont.signatures()) {
        sigs.push_back({{"source", s.source_type}, {"predicate", s.predicate_type}, {"destination", s.destination_type}});
    }
    return {{"uri", ont.uri()}, {"root", std::string(kUniversalType)}, {"types", types}, {"relations", sigs}};
}

}  // namespace cnav
