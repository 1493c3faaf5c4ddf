#pragma once

#include "mpsrisk/session.hpp"

#include <cstdint>
#include <string>

namespace httplib {
class Server;
}

namespace mpsrisk {

struct ServerConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string data_dir = "sessions";
  std::uint64_t seed = 1;
  bool fsync = true;
};

// HTTP status for a SessionError code.
int http_status(const std::string& code);

// Routes:
//   GET  /geometry
//   POST /sessions
//   GET  /sessions/{id}
//   POST /sessions/{id}/subjects
//   GET  /sessions/{id}/subjects/{sid}/next
//   POST /sessions/{id}/subjects/{sid}/choices
//   POST /sessions/{id}/subjects/{sid}/finalize
//   POST /sessions/{id}/close
//   GET  /sessions/{id}/export?format=csv|jsonl
//   GET  /sessions/{id}/dashboard
// Tokens travel in the X-Token header, a "token" query parameter, or a
// "token" body field.
void register_routes(httplib::Server& http, SessionStore& store);

// Blocks until the server stops.
int run_server(const ServerConfig& config);

}  // namespace mpsrisk
