#pragma once

// Ontology-aware matching and the Conceptual Proximity score.

#include "cnav/kcl.hpp"
#include "cnav/ontology.hpp"

namespace cnav {

// Slot presence must agree; every candidate type must equal or specialise the
// objective's type in the same slot, referents compatible as in match_strict.
// Throws UnknownType if any type of either graph is undeclared.
bool match_subsume(const KclGraph& objective, const KclGraph& candidate, const Ontology& ont);

bool matches(const KclGraph& objective, const KclGraph& candidate, MatchMode mode, const Ontology& ont);

// Copy of `a` without the entries matching any graph of `b`. Weights play no
// part in the decision. In Subsume mode `a` is the objective side.
Csv withdraw(const Csv& a, const Csv& b, MatchMode mode, const Ontology& ont);
Csv withdraw_strict(const Csv& a, const Csv& b);

// Weighted coverage of `objective` by `resource`:
//   sum_g w(g) * max{ w(h) : h in resource, match_subsume(g, h) } / sum_g w(g)
// An objective whose weights are all zero is scored as if unit-weighted.
// Throws EmptyObjective on an empty objective.
double conceptual_proximity(const Csv& objective, const Csv& resource, const Ontology& ont);

// True iff strict withdrawal of `knowledge` leaves nothing of `objective`.
bool covers(const Csv& objective, const Csv& knowledge);

}  // namespace cnav
