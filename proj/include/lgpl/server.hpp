#pragma once

#include <string>

#include "lgpl/session.hpp"

namespace httplib {
class Server;
}

namespace lgpl {

/// Registers the REST routes:
///   POST /sessions                    {instruction, n, source, prior?, sigma?}
///   GET  /sessions/{id}
///   POST /sessions/{id}/ranking       {ranking: [indices best-first]}
///   POST /sessions/{id}/feedback      {feedback: text}
///   GET  /sessions/{id}/result
/// Errors are returned as {"error": {"code", "message"}}.
void install_routes(httplib::Server& server, SessionManager& sessions,
                    const std::string& cors_origin = "*");

}  // namespace lgpl
