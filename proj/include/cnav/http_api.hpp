#pragma once

// HTTP surface of the session service. Routing is transport-independent:
// `HttpApi::handle` maps (method, decoded path, body) to (status, JSON), and
// `mount` binds it to cpp-httplib.

#include <string>
#include <string_view>

#include "cnav/error.hpp"
#include "cnav/session.hpp"

namespace httplib {
class Server;
}

namespace cnav {

struct ApiResponse {
    int status = 200;
    json body;
};

int http_status(ErrorCode code);

class HttpApi {
public:
    explicit HttpApi(SessionService& service) : service_(service) {}

    //  POST /sessions                      -> 201 session
    //  GET  /sessions/{id}                 -> session
    //  GET  /sessions/{id}/readiness       -> {session, steps: [{id, ready}]}
    //  POST /sessions/{id}/consulted/{cid} -> session
    //  POST /sessions/{id}/more/{cid}      -> {items: [{id, title, cp, time}], reason?}
    //  POST /sessions/{id}/adopt/{cid}     -> session
    //  GET  /resources, /resources/{id}, /ontology
    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

private:
    SessionService& service_;
};

// Registers every route on `server` (CORS-enabled, JSON responses).
void mount(httplib::Server& server, const HttpApi& api);

}  // namespace cnav
