#pragma once

#include "dj/fixtures.hpp"
#include "dj/io.hpp"
#include "dj/session.hpp"

#include <httplib.h>

#include <string>

namespace dj {

struct HttpOptions
{
    std::string cors_origin = "*"; // empty disables CORS headers
};

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(dump(body), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f)
{
    try {
        send_json(res, 200, f());
    } catch (const SessionError& e) {
        send_json(res, e.status(), e.body());
    } catch (const DocumentError& e) {
        send_json(res, 422, SessionError(422, "invalid-document", e.what()).body());
    } catch (const nlohmann::json::exception& e) {
        send_json(res, 400, SessionError(400, "bad-request", e.what()).body());
    }
}

} // namespace detail

/// POST /sessions, GET /sessions/{id}/next, POST /sessions/{id}/answer,
/// GET /sessions/{id}/report, GET /instances, GET /instances/{name}.
inline void install_routes(httplib::Server& server, SessionStore& store, const HttpOptions& opts = {})
{
    using httplib::Request;
    using httplib::Response;
    if (!opts.cors_origin.empty()) {
        server.set_default_headers({{"Access-Control-Allow-Origin", opts.cors_origin},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(.*)", [](const Request&, Response& res) { res.status = 204; });
    }

    server.Post("/sessions", [&store](const Request& req, Response& res) {
        detail::guarded(res, [&] { return store.create(parse_json(req.body)); });
    });
    server.Get(R"(/sessions/([^/]+)/next)", [&store](const Request& req, Response& res) {
        detail::guarded(res, [&] { return store.next(req.matches[1]); });
    });
    server.Post(R"(/sessions/([^/]+)/answer)", [&store](const Request& req, Response& res) {
        detail::guarded(res, [&] { return store.answer(req.matches[1], parse_json(req.body)); });
    });
    server.Get(R"(/sessions/([^/]+)/report)", [&store](const Request& req, Response& res) {
        detail::guarded(res, [&] { return store.report(req.matches[1]); });
    });
    server.Get("/instances", [](const Request&, Response& res) {
        Json names = Json::array();
        for (const auto& [name, doc] : fixtures::all())
            names.push_back(name);
        detail::send_json(res, 200, {{"instances", names}});
    });
    server.Get(R"(/instances/([^/]+))", [](const Request& req, Response& res) {
        auto it = fixtures::all().find(req.matches[1]);
        if (it == fixtures::all().end())
            detail::send_json(res, 404, SessionError(404, "unknown-instance", "unknown instance").body());
        else
            detail::send_json(res, 200, situation_json(it->second));
    });
}

} // namespace dj
