#include <doctest.h>
#include <httplib.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "cnav/http_api.hpp"
#include "cnav/session.hpp"
#include "support/testing.hpp"

using namespace cnav;
using namespace cnav::testing;
namespace fs = std::filesystem;

namespace {

// R1 teaches C (needs B) and relates to D; R2 teaches B (needs A).
std::shared_ptr<const ResourceStore> service_store() {
    auto store = std::make_shared<ResourceStore>();
    store->add(make_rd("R1", csv({"[C]"}), csv({"[B]"}), 10, std::nullopt, csv({"[D]"})));
    store->add(make_rd("R2", csv({"[B]"}), csv({"[A]"}), 10));
    auto r3 = make_rd("R3", csv({"[D]", "[E]"}), {}, 15);
    r3.segments = {{"part", csv({"[D]"}), {}, 5}};
    store->add(r3);
    store->add(make_rd("R4", csv({"[D]"}), {}, 30));
    return store;
}

std::shared_ptr<const Ontology> service_ontology() { return std::make_shared<const Ontology>(letters_ontology()); }

LearnerProfile chain_profile(std::optional<double> budget = 50.0) { return {csv({"[A]"}), csv({"[C]"}), budget}; }

json chain_request() {
    return {{"profile", profile_to_json(chain_profile())}, {"strategy", "backward"}};
}

fs::path temp_file(const std::string& name) {
    auto p = fs::temp_directory_path() / ("cnav-" + name + "-" + std::to_string(::getpid()));
    fs::remove(p);
    return p;
}

}  // namespace

TEST_CASE("session lifecycle") {
    SessionService svc(service_store(), service_ontology());
    auto s = svc.create_session(chain_profile(), "backward");
    CHECK(s.id == "s1");
    CHECK(s.pending == std::vector<std::string>{"R2", "R1"});
    CHECK(s.plan.status == PlanStatus::Complete);
    CHECK_FALSE(s.created_at.empty());

    CHECK(svc.readiness("s1") == ReadinessReport{{"R2", true}, {"R1", false}});
    auto after = svc.mark_consulted("s1", "R2");
    CHECK(after.consulted == std::vector<std::string>{"R2"});
    CHECK(after.pending == std::vector<std::string>{"R1"});
    CHECK(svc.readiness("s1") == ReadinessReport{{"R1", true}});
    CHECK(svc.remaining_time(after) == 40.0);

    // consulting twice is harmless
    CHECK(svc.mark_consulted("s1", "R2").consulted.size() == 1);
    CHECK(error_code([&] { svc.mark_consulted("s1", "R4"); }) == ErrorCode::NotFound);
    CHECK(error_code([&] { svc.mark_consulted("s9", "R2"); }) == ErrorCode::NotFound);

    // R3 and R4 both cover D; R3 is shorter
    auto more = svc.request_more("s1", "R1");
    CHECK_FALSE(more.reason);
    REQUIRE(more.items.size() == 2);
    CHECK(more.items[0].id == "R3");
    CHECK(more.items[1].id == "R4");

    auto no_rel = svc.request_more("s1", "R2");
    CHECK(no_rel.items.empty());
    CHECK(no_rel.reason == "no_relations");
    CHECK(error_code([&] { svc.request_more("s1", "R4"); }) == ErrorCode::NotFound);

    auto adopted = svc.adopt("s1", "R3");
    CHECK(adopted.pending == std::vector<std::string>{"R1", "R3"});
    CHECK(svc.adopt("s1", "R3").pending.size() == 2);
    CHECK(error_code([&] { svc.adopt("s1", "R9"); }) == ErrorCode::NotFound);

    // members never come back through expansion
    auto again = svc.request_more("s1", "R1");
    REQUIRE(again.items.size() == 1);
    CHECK(again.items[0].id == "R4");

    CHECK(svc.create_session(chain_profile(), "backward").id == "s2");
    CHECK(svc.list_ids() == std::vector<std::string>{"s1", "s2"});
}

TEST_CASE("session strategies and argument checks") {
    SessionService svc(service_store(), service_ontology());
    auto fwd = svc.create_session({{}, {}, 30.0}, "forward", {{"start", "R1"}});
    CHECK(fwd.pending == std::vector<std::string>{"R1", "R3"});

    json tmpl = json::array({csv_to_json(csv({"[B]"})), csv_to_json(csv({"[C]"}))});
    auto t = svc.create_session({{}, {}, std::nullopt}, "template", {{"template", tmpl}});
    CHECK(t.pending == std::vector<std::string>{"R2", "R1"});
    CHECK_FALSE(svc.remaining_time(t));

    CHECK(error_code([&] { svc.create_session({{}, {}, 30.0}, "forward", json::object()); }) ==
          ErrorCode::InvalidProfile);
    CHECK(error_code([&] { svc.create_session({{}, {}, std::nullopt}, "forward", {{"start", "R1"}}); }) ==
          ErrorCode::InvalidProfile);
    CHECK(error_code([&] { svc.create_session({{}, {}, std::nullopt}, "template", json::object()); }) ==
          ErrorCode::InvalidProfile);
    CHECK(error_code([&] { svc.create_session(chain_profile(), "sideways"); }) == ErrorCode::InvalidProfile);
    CHECK(error_code([&] { svc.create_session({{}, {}, 10.0}, "backward"); }) == ErrorCode::InvalidProfile);
    CHECK(svc.list_ids().size() == 2);

    auto filled = svc.create_session(chain_profile(60.0), "backward", {{"fill_gaps", true}});
    CHECK(filled.pending == std::vector<std::string>{"R2", "R1", "R3"});
}

TEST_CASE("sessions survive a restart through the snapshot file") {
    const auto path = temp_file("sessions.json");
    {
        SessionService svc(service_store(), service_ontology(), {}, path);
        svc.create_session(chain_profile(), "backward");
        svc.mark_consulted("s1", "R2");
        svc.adopt("s1", "R4");
        CHECK(fs::exists(path));
    }
    SessionService restored(service_store(), service_ontology(), {}, path);
    auto s = restored.get("s1");
    CHECK(s.consulted == std::vector<std::string>{"R2"});
    CHECK(s.pending == std::vector<std::string>{"R1", "R4"});
    CHECK(s.profile.time_budget == 50.0);
    CHECK(s.plan.ids() == std::vector<std::string>{"R2", "R1"});
    CHECK(restored.readiness("s1") == ReadinessReport{{"R1", true}, {"R4", true}});
    CHECK(restored.create_session(chain_profile(), "backward").id == "s2");
    fs::remove(path);

    const auto bad = temp_file("garbage.json");
    std::ofstream(bad) << "{not json";
    CHECK(error_code([&] { SessionService(service_store(), service_ontology(), {}, bad); }) == ErrorCode::ParseError);
    fs::remove(bad);
}

TEST_CASE("concurrent use of independent and shared sessions") {
    SessionService svc(service_store(), service_ontology());
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            try {
                for (int i = 0; i < 20; ++i) {
                    auto s = svc.create_session(chain_profile(), "backward");
                    svc.mark_consulted(s.id, "R2");
                    svc.adopt(s.id, "R3");
                    svc.adopt("s1", "R4");
                    if (!svc.readiness(s.id).front().ready) ++failures;
                    svc.request_more(s.id, "R1");
                    (void)svc.session_to_json(svc.get("s1"));
                }
            } catch (const std::exception&) {
                ++failures;
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(failures == 0);
    CHECK(svc.list_ids().size() == 160);
    CHECK(svc.get("s1").has_member("R4"));
}

TEST_CASE("HTTP routes without a transport") {
    SessionService svc(service_store(), service_ontology());
    HttpApi api(svc);

    auto created = api.handle("POST", "/sessions", chain_request().dump());
    REQUIRE(created.status == 201);
    CHECK(created.body["id"] == "s1");
    CHECK(created.body["pending"][0]["id"] == "R2");
    CHECK(created.body["pending"][0]["ready"] == true);
    CHECK(created.body["pending"][1]["ready"] == false);
    CHECK(created.body["remaining_time"] == 50.0);

    auto ready = api.handle("GET", "/sessions/s1/readiness", "");
    CHECK(ready.status == 200);
    CHECK(ready.body["steps"][1] == json{{"id", "R1"}, {"ready", false}});

    CHECK(api.handle("POST", "/sessions/s1/consulted/R2", "").status == 200);
    CHECK(api.handle("GET", "/sessions/s1/readiness", "").body["steps"][0] == json{{"id", "R1"}, {"ready", true}});

    auto more = api.handle("POST", "/sessions/s1/more/R1", "");
    CHECK(more.status == 200);
    CHECK(more.body["from"] == "R1");
    REQUIRE(more.body["items"].size() == 2);
    CHECK(more.body["items"][0]["id"] == "R3");
    CHECK(more.body["items"][0]["title"] == "Resource R3");

    CHECK(api.handle("POST", "/sessions/s1/more/R2", "").body["reason"] == "no_relations");
    CHECK(api.handle("POST", "/sessions/s1/adopt/R3#part", "").body["pending"][1]["id"] == "R3#part");
    CHECK(api.handle("GET", "/sessions/s1", "").body["consulted"][0]["id"] == "R2");

    CHECK(api.handle("GET", "/resources", "").body.size() == 4);
    CHECK(api.handle("GET", "/resources/R3", "").body["segments"].size() == 1);
    CHECK(api.handle("GET", "/ontology", "").status == 200);

    auto missing = api.handle("GET", "/sessions/s7", "");
    CHECK(missing.status == 404);
    CHECK(missing.body["error"] == "NotFound");
    CHECK(api.handle("GET", "/resources/nope", "").status == 404);
    CHECK(api.handle("DELETE", "/sessions/s1", "").status == 404);
    CHECK(api.handle("GET", "/", "").status == 404);
    CHECK(api.handle("POST", "/sessions", "{oops").status == 400);
    CHECK(api.handle("POST", "/sessions", "{}").body["error"] == "InvalidProfile");
    CHECK(api.handle("POST", "/sessions", R"({"profile": {"objective": []}})").status == 400);

    CHECK(http_status(ErrorCode::DuplicateId) == 409);
    CHECK(http_status(ErrorCode::RuleConflict) == 409);
    CHECK(http_status(ErrorCode::InvalidStore) == 500);
    CHECK(http_status(ErrorCode::BudgetTooSmall) == 400);
}

TEST_CASE("HTTP over a loopback socket") {
    SessionService svc(service_store(), service_ontology());
    HttpApi api(svc);
    httplib::Server server;
    mount(server, api);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/sessions", chain_request().dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
    auto id = json::parse(created->body)["id"].get<std::string>();

    auto before = client.Get("/sessions/" + id + "/readiness");
    REQUIRE(before);
    CHECK(json::parse(before->body)["steps"][1]["ready"] == false);
    REQUIRE(client.Post("/sessions/" + id + "/consulted/R2", "", "application/json"));
    auto after = client.Get("/sessions/" + id + "/readiness");
    REQUIRE(after);
    CHECK(json::parse(after->body)["steps"][0]["ready"] == true);

    // segment ids carry '#', which must travel percent-encoded
    auto adopt = client.Post("/sessions/" + id + "/adopt/R3%23part", "", "application/json");
    REQUIRE(adopt);
    CHECK(adopt->status == 200);
    CHECK(json::parse(adopt->body)["pending"][1]["id"] == "R3#part");

    auto preflight = client.Options("/sessions");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    auto missing = client.Get("/sessions/zzz");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    listener.join();
}
