#pragma once

// Learner sessions over a shared, read-only store and ontology: the plan,
// what has been consulted, readiness of the rest, and live expansion.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cnav/json_io.hpp"
#include "cnav/planner.hpp"

namespace cnav {

enum class Strategy { Backward, Forward, Template };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);  // InvalidProfile

struct Session {
    std::string id;
    Strategy strategy = Strategy::Backward;
    json strategy_args = json::object();
    std::string created_at;  // ISO-8601 UTC
    LearnerProfile profile;
    CoursePlan plan;
    std::vector<std::string> pending;    // presentation order, then adopted ids
    std::vector<std::string> consulted;  // consultation order

    bool has_member(std::string_view cid) const;
};

struct ReadinessEntry {
    std::string id;
    bool ready = false;

    friend bool operator==(const ReadinessEntry&, const ReadinessEntry&) = default;
};
using ReadinessReport = std::vector<ReadinessEntry>;

// A pending step is ready when its prerequisites are strictly covered by the
// learner's known CSV plus the contents of everything consulted.
ReadinessReport readiness(const Session& s, const ResourceStore& store);

struct MoreResult {
    std::vector<RankedCandidate> items;
    std::optional<std::string> reason;  // "no_relations" when the candidate has none
};

class SessionService {
public:
    SessionService(std::shared_ptr<const ResourceStore> store, std::shared_ptr<const Ontology> ont,
                   PlannerConfig config = {}, std::optional<std::filesystem::path> snapshot = std::nullopt);

    // strategy_args: Forward {start}, Template {template: [csv, ...]};
    // Backward accepts an optional {fill_gaps: bool}.
    Session create_session(const LearnerProfile& profile, std::string_view strategy, const json& strategy_args = {});
    Session get(std::string_view id) const;
    std::vector<std::string> list_ids() const;

    Session mark_consulted(std::string_view id, std::string_view cid);
    ReadinessReport readiness(std::string_view id) const;
    MoreResult request_more(std::string_view id, std::string_view cid) const;
    Session adopt(std::string_view id, std::string_view cid);

    // budget minus time of consulted candidates; nullopt when unbounded
    std::optional<double> remaining_time(const Session& s) const;

    json session_to_json(const Session& s) const;

    void save_snapshot() const;
    void load_snapshot();

    const ResourceStore& store() const noexcept { return *store_; }
    const Ontology& ontology() const noexcept { return *ont_; }
    const PlannerConfig& config() const noexcept { return config_; }

private:
    struct Slot {
        mutable std::mutex mutex;
        Session session;
    };

    std::shared_ptr<Slot> slot(std::string_view id) const;
    void persist() const;

    std::shared_ptr<const ResourceStore> store_;
    std::shared_ptr<const Ontology> ont_;
    PlannerConfig config_;
    std::optional<std::filesystem::path> snapshot_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>, std::less<>> sessions_;
    std::size_t next_id_ = 1;
    mutable std::mutex snapshot_mutex_;
};

}  // namespace cnav
