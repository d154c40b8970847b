#include "lgpl/server.hpp"

#include <httplib.h>

namespace lgpl {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

nlohmann::json parse_body(const httplib::Request& req) {
  auto body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    throw SessionError(SessionError::Kind::kValidation, "request body is not valid JSON");
  }
  return body;
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const SessionError& e) {
      send_error(res, e.http_status(), e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  };
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions, const std::string& cors_origin) {
  server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/sessions", guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
                const Session s = sessions.create_session(create_request_from_json(parse_body(req)));
                send_json(res, 201, session_to_json(s));
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_to_json(sessions.get(req.matches[1])));
             }));

  server.Post(R"(/sessions/([^/]+)/ranking)",
              guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.is_object() || !body.contains("ranking") || !body.at("ranking").is_array()) {
                  throw SessionError(SessionError::Kind::kValidation, "body must hold a 'ranking' array");
                }
                std::vector<std::size_t> ranking;
                for (const auto& v : body.at("ranking")) {
                  if (!v.is_number_integer() || v.get<long long>() < 0) {
                    throw SessionError(SessionError::Kind::kValidation, "ranking entries must be non-negative integers");
                  }
                  ranking.push_back(v.get<std::size_t>());
                }
                const Session s = sessions.submit_ranking(req.matches[1], ranking);
                send_json(res, 200, session_to_json(s));
              }));

  server.Post(R"(/sessions/([^/]+)/feedback)",
              guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.is_object() || !body.contains("feedback") || !body.at("feedback").is_string()) {
                  throw SessionError(SessionError::Kind::kValidation, "body must hold a 'feedback' string");
                }
                const Session s = sessions.submit_feedback(req.matches[1], body.at("feedback").get<std::string>());
                send_json(res, 200, session_to_json(s));
              }));

  server.Get(R"(/sessions/([^/]+)/result)",
             guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
               const Session s = sessions.get(req.matches[1]);
               if (s.state != SessionState::kFitted) {
                 throw SessionError(SessionError::Kind::kConflict,
                                    "session " + s.id + " has no result yet (state " +
                                        std::string(state_name(s.state)) + ")");
               }
               send_json(res, 200, session_to_json(s).at("result"));
             }));
}

}  // namespace lgpl
