#include "cnav/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "cnav/error.hpp"
#include "cnav/proximity.hpp"

namespace cnav {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Backward: return "backward";
    case Strategy::Forward: return "forward";
    case Strategy::Template: return "template";
    }
    return "backward";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "backward") return Strategy::Backward;
    if (name == "forward") return Strategy::Forward;
    if (name == "template") return Strategy::Template;
    throw Error(ErrorCode::InvalidProfile, "unknown strategy '" + std::string(name) + "'");
}

bool Session::has_member(std::string_view cid) const {
    return std::find(pending.begin(), pending.end(), cid) != pending.end() ||
           std::find(consulted.begin(), consulted.end(), cid) != consulted.end();
}

ReadinessReport readiness(const Session& s, const ResourceStore& store) {
    Csv knowledge = s.profile.known;
    for (const auto& cid : s.consulted) knowledge = merge_into(knowledge, store.candidate(cid).content());
    ReadinessReport out;
    for (const auto& cid : s.pending) out.push_back({cid, covers(store.candidate(cid).prerequisites(), knowledge)});
    return out;
}

namespace {

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

SessionService::SessionService(std::shared_ptr<const ResourceStore> store, std::shared_ptr<const Ontology> ont,
                               PlannerConfig config, std::optional<std::filesystem::path> snapshot)
    : store_(std::move(store)), ont_(std::move(ont)), config_(std::move(config)), snapshot_(std::move(snapshot)) {
    if (snapshot_ && std::filesystem::exists(*snapshot_)) load_snapshot();
}

Session SessionService::create_session(const LearnerProfile& profile, std::string_view strategy_name,
                                       const json& strategy_args) {
    const auto strategy = parse_strategy(strategy_name);
    check_profile(profile);
    const json args = strategy_args.is_null() ? json::object() : strategy_args;
    if (!args.is_object()) throw Error(ErrorCode::InvalidProfile, "strategy_args must be an object");

    Session s;
    s.strategy = strategy;
    s.strategy_args = args;
    s.profile = profile;
    s.created_at = now_iso8601();

    switch (strategy) {
    case Strategy::Backward:
        if (profile.objective.empty()) throw Error(ErrorCode::InvalidProfile, "backward navigation needs an objective");
        s.plan = backward_navigate(profile, *store_, *ont_, config_);
        if (args.value("fill_gaps", false)) s.plan = fill_time_gap(s.plan, profile, *store_, *ont_, config_);
        break;
    case Strategy::Forward: {
        if (!args.contains("start") || !args["start"].is_string()) {
            throw Error(ErrorCode::InvalidProfile, "forward navigation needs strategy_args.start");
        }
        if (!profile.time_budget) throw Error(ErrorCode::InvalidProfile, "forward navigation needs a time budget");
        s.plan = forward_navigate(args["start"].get<std::string>(), *store_, *ont_, *profile.time_budget, config_);
        break;
    }
    case Strategy::Template: {
        if (!args.contains("template") || !args["template"].is_array()) {
            throw Error(ErrorCode::InvalidProfile, "template strategy needs strategy_args.template");
        }
        std::vector<Csv> segments;
        for (const auto& seg : args["template"]) segments.push_back(csv_from_json(seg));
        s.plan = template_instantiate(segments, profile, *store_, *ont_, config_);
        break;
    }
    }
    s.pending = s.plan.ids();

    auto slot = std::make_shared<Slot>();
    {
        std::unique_lock lock(sessions_mutex_);
        s.id = "s" + std::to_string(next_id_++);
        slot->session = s;
        sessions_.emplace(s.id, slot);
    }
    persist();
    return s;
}

std::shared_ptr<SessionService::Slot> SessionService::slot(std::string_view id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + std::string(id) + "'");
    return it->second;
}

Session SessionService::get(std::string_view id) const {
    auto sl = slot(id);
    std::lock_guard lock(sl->mutex);
    return sl->session;
}

std::vector<std::string> SessionService::list_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, sl] : sessions_) out.push_back(id);
    return out;
}

Session SessionService::mark_consulted(std::string_view id, std::string_view cid) {
    auto sl = slot(id);
    Session copy;
    bool changed = false;
    {
        std::lock_guard lock(sl->mutex);
        auto& s = sl->session;
        auto it = std::find(s.pending.begin(), s.pending.end(), cid);
        if (it != s.pending.end()) {
            s.pending.erase(it);
            s.consulted.emplace_back(cid);
            changed = true;
        } else if (std::find(s.consulted.begin(), s.consulted.end(), cid) == s.consulted.end()) {
            throw Error(ErrorCode::NotFound, "'" + std::string(cid) + "' is not part of session " + s.id);
        }
        copy = s;
    }
    if (changed) persist();
    return copy;
}

ReadinessReport SessionService::readiness(std::string_view id) const {
    auto sl = slot(id);
    std::lock_guard lock(sl->mutex);
    return cnav::readiness(sl->session, *store_);
}

MoreResult SessionService::request_more(std::string_view id, std::string_view cid) const {
    auto sl = slot(id);
    std::lock_guard lock(sl->mutex);
    const auto& s = sl->session;
    if (!s.has_member(cid)) throw Error(ErrorCode::NotFound, "'" + std::string(cid) + "' is not part of session " + s.id);
    TagSet members(s.pending.begin(), s.pending.end());
    members.insert(s.consulted.begin(), s.consulted.end());
    try {
        return {conceptual_expansion(cid, *store_, *ont_, config_.expansion_limit, config_.selection_unit, members),
                std::nullopt};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRelations) throw;
        return {{}, "no_relations"};
    }
}

Session SessionService::adopt(std::string_view id, std::string_view cid) {
    if (!store_->has_candidate(cid)) throw Error(ErrorCode::NotFound, "no candidate '" + std::string(cid) + "'");
    auto sl = slot(id);
    Session copy;
    bool changed = false;
    {
        std::lock_guard lock(sl->mutex);
        auto& s = sl->session;
        if (!s.has_member(cid)) {
            s.pending.emplace_back(cid);
            changed = true;
        }
        copy = s;
    }
    if (changed) persist();
    return copy;
}

std::optional<double> SessionService::remaining_time(const Session& s) const {
    if (!s.profile.time_budget) return std::nullopt;
    double used = 0.0;
    for (const auto& cid : s.consulted) used += store_->candidate(cid).time_value();
    return *s.profile.time_budget - used;
}

json SessionService::session_to_json(const Session& s) const {
    json pending = json::array();
    for (const auto& r : cnav::readiness(s, *store_)) {
        auto c = store_->candidate(r.id);
        pending.push_back({{"id", r.id}, {"title", c.title()}, {"uri", c.uri()}, {"time", c.time_value()}, {"ready", r.ready}});
    }
    json consulted = json::array();
    for (const auto& cid : s.consulted) {
        auto c = store_->candidate(cid);
        consulted.push_back({{"id", cid}, {"title", c.title()}, {"uri", c.uri()}});
    }
    auto remaining = remaining_time(s);
    return {{"id", s.id},
            {"strategy", std::string(to_string(s.strategy))},
            {"strategy_args", s.strategy_args},
            {"created_at", s.created_at},
            {"profile", profile_to_json(s.profile)},
            {"plan", plan_to_json(s.plan)},
            {"pending", std::move(pending)},
            {"consulted", std::move(consulted)},
            {"remaining_time", remaining ? json(*remaining) : json(nullptr)}};
}

void SessionService::persist() const {
    if (snapshot_) save_snapshot();
}

void SessionService::save_snapshot() const {
    if (!snapshot_) return;
    std::lock_guard snap_lock(snapshot_mutex_);
    json doc{{"next_id", 0}, {"sessions", json::array()}};
    {
        std::shared_lock lock(sessions_mutex_);
        doc["next_id"] = next_id_;
        for (const auto& [id, sl] : sessions_) {
            std::lock_guard slot_lock(sl->mutex);
            const auto& s = sl->session;
            doc["sessions"].push_back({{"id", s.id},
                                       {"strategy", std::string(to_string(s.strategy))},
                                       {"strategy_args", s.strategy_args},
                                       {"created_at", s.created_at},
                                       {"profile", profile_to_json(s.profile)},
                                       {"plan", plan_to_json(s.plan)},
                                       {"pending", s.pending},
                                       {"consulted", s.consulted}});
        }
    }
    auto tmp = *snapshot_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error(ErrorCode::NotFound, "cannot write session snapshot " + tmp.string());
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, *snapshot_);
}

void SessionService::load_snapshot() {
    if (!snapshot_) return;
    std::ifstream in(*snapshot_);
    if (!in) throw Error(ErrorCode::NotFound, "cannot read session snapshot " + snapshot_->string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "session snapshot: " + std::string(e.what()));
    }
    std::unique_lock lock(sessions_mutex_);
    sessions_.clear();
    next_id_ = doc.value("next_id", std::size_t{1});
    for (const auto& j : doc.at("sessions")) {
        auto sl = std::make_shared<Slot>();
        auto& s = sl->session;
        s.id = j.at("id").get<std::string>();
        s.strategy = parse_strategy(j.at("strategy").get<std::string>());
        s.strategy_args = j.value("strategy_args", json::object());
        s.created_at = j.value("created_at", "");
        s.profile.known = csv_from_json(j.at("profile").at("known"));
        s.profile.objective = csv_from_json(j.at("profile").at("objective"));
        if (const auto& b = j.at("profile").at("time_budget"); !b.is_null()) s.profile.time_budget = b.get<double>();
        s.plan = plan_from_json(j.at("plan"));
        s.pending = j.at("pending").get<std::vector<std::string>>();
        s.consulted = j.at("consulted").get<std::vector<std::string>>();
        sessions_.emplace(s.id, std::move(sl));
    }
}

}  // namespace cnav
