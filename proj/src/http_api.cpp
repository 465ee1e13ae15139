#include "cnav/http_api.hpp"

#include <httplib.h>

#include <vector>

#include "cnav/error.hpp"

namespace cnav {

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::DuplicateId:
    case ErrorCode::RuleConflict: return 409;
    case ErrorCode::InvalidStore: return 500;
    default: return 400;
    }
}

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
        if (path.front() == '/') {
            path.remove_prefix(1);
            continue;
        }
        auto slash = path.find('/');
        parts.push_back(path.substr(0, slash));
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash);
    }
    return parts;
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
    return {status, {{"error", code}, {"message", message}}};
}

}  // namespace

ApiResponse HttpApi::handle(std::string_view method, std::string_view path, std::string_view body) const {
    const auto parts = split_path(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    try {
        if (parts.empty()) return error_response(404, "NotFound", "no route");

        if (parts[0] == "sessions") {
            if (parts.size() == 1 && post) {
                json req = body.empty() ? json::object() : json::parse(body);
                if (!req.is_object() || !req.contains("profile")) {
                    throw Error(ErrorCode::InvalidProfile, "request body needs a profile");
                }
                auto profile = profile_from_json(req["profile"]);
                auto strategy = req.value("strategy", std::string("backward"));
                auto s = service_.create_session(profile, strategy, req.value("strategy_args", json::object()));
                return {201, service_.session_to_json(s)};
            }
            if (parts.size() == 2 && get) return {200, service_.session_to_json(service_.get(parts[1]))};
            if (parts.size() == 3 && get && parts[2] == "readiness") {
                json steps = json::array();
                for (const auto& r : service_.readiness(parts[1])) steps.push_back({{"id", r.id}, {"ready", r.ready}});
                return {200, {{"session", parts[1]}, {"steps", std::move(steps)}}};
            }
            if (parts.size() == 4 && post) {
                const std::string cid(parts[3]);
                if (parts[2] == "consulted") {
                    return {200, service_.session_to_json(service_.mark_consulted(parts[1], cid))};
                }
                if (parts[2] == "adopt") return {200, service_.session_to_json(service_.adopt(parts[1], cid))};
                if (parts[2] == "more") {
                    auto more = service_.request_more(parts[1], cid);
                    json items = json::array();
                    for (const auto& r : more.items) {
                        items.push_back({{"id", r.id},
                                         {"title", service_.store().candidate(r.id).title()},
                                         {"cp", r.cp},
                                         {"time", r.time_value}});
                    }
                    json out{{"session", parts[1]}, {"from", cid}, {"items", std::move(items)}};
                    if (more.reason) out["reason"] = *more.reason;
                    return {200, out};
                }
            }
        } else if (parts[0] == "resources" && get) {
            if (parts.size() == 1) {
                json arr = json::array();
                for (const auto* rd : service_.store().list()) arr.push_back(rd_summary_to_json(*rd));
                return {200, arr};
            }
            if (parts.size() == 2) return {200, rd_to_json(service_.store().get(parts[1]))};
        } else if (parts[0] == "ontology" && parts.size() == 1 && get) {
            return {200, ontology_to_json(service_.ontology())};
        }
        return error_response(404, "NotFound", "no route for " + std::string(method) + " " + std::string(path));
    } catch (const Error& e) {
        return error_response(http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
        return error_response(400, "ParseError", e.what());
    }
}

void mount(httplib::Server& server, const HttpApi& api) {
    auto dispatch = [&api](const httplib::Request& req, httplib::Response& res) {
        auto out = api.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(out.body.dump(), "application/json");
    };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

}  // namespace cnav
