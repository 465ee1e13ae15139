#pragma once

// JSON mapping of the engine's values. CSVs are arrays of objects mirroring
// `phrase_kldp`: {source, source_ref?, predicate?, destination?,
// destination_ref?, weight?}.

#include <nlohmann/json.hpp>

#include "cnav/kcl.hpp"
#include "cnav/planner.hpp"
#include "cnav/resource.hpp"
#include "cnav/store.hpp"

namespace cnav {

using json = nlohmann::json;

json csv_to_json(const Csv& csv);
Csv csv_from_json(const json& j);  // throws ParseError / InvariantViolation

json profile_to_json(const LearnerProfile& p);
// Accepts `objective` as a CSV or a curriculum {name, contents: [{label, csv}]}.
LearnerProfile profile_from_json(const json& j);

json plan_to_json(const CoursePlan& plan);
CoursePlan plan_from_json(const json& j);

json ranked_to_json(const std::vector<RankedCandidate>& ranked);

PlannerConfig config_from_json(const json& j, PlannerConfig base = {});
json config_to_json(const PlannerConfig& c);

json rd_summary_to_json(const ResourceDescription& rd);
json rd_to_json(const ResourceDescription& rd);
json ontology_to_json(const Ontology& ont);

}  // namespace cnav
