#include "mpsrisk/server.hpp"

#include "mpsrisk/json_io.hpp"

#include <httplib.h>

#include <iostream>

namespace mpsrisk {

using nlohmann::json;

int http_status(const std::string& code) {
  if (code == "invalid_config" || code == "invalid_request" || code == "invalid_choice") return 400;
  if (code == "bad_token") return 403;
  if (code == "unknown_session" || code == "unknown_subject") return 404;
  if (code == "corrupt_log") return 500;
  return 409;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const std::string& code, const std::string& message) {
  send_json(res, json{{"error", code}, {"message", message}}, http_status(code));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw SessionError("invalid_request", std::string("request body is not JSON: ") + e.what());
  }
}

std::string request_token(const httplib::Request& req, const json& body) {
  if (req.has_header("X-Token")) return req.get_header_value("X-Token");
  if (req.has_param("token")) return req.get_param_value("token");
  if (body.is_object() && body.contains("token") && body["token"].is_string()) return body["token"].get<std::string>();
  return {};
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const SessionError& e) {
      send_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, "invalid_request", e.what());
    } catch (const std::exception& e) {
      send_json(res, json{{"error", "internal"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

void register_routes(httplib::Server& http, SessionStore& store) {
  const std::string id = "([A-Za-z0-9_-]+)";

  http.Get("/geometry", guarded([](const httplib::Request&, httplib::Response& res) { send_json(res, geometry_json()); }));

  http.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              auto session = store.create(parse_body(req));
              const SessionState state = session->snapshot();
              json body = session->describe();
              body["experimenter_token"] = experimenter_token(state);
              send_json(res, body, 201);
            }));

  http.Get("/sessions/" + id, guarded([&store](const httplib::Request& req, httplib::Response& res) {
             send_json(res, store.get(req.matches[1])->describe());
           }));

  http.Post("/sessions/" + id + "/subjects", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const json body = parse_body(req);
              std::optional<std::string> requested;
              if (body.contains("subject_id")) requested = body.at("subject_id").get<std::string>();
              send_json(res, store.get(req.matches[1])->register_subject(requested), 201);
            }));

  http.Get("/sessions/" + id + "/subjects/" + id + "/next",
           guarded([&store](const httplib::Request& req, httplib::Response& res) {
             send_json(res, store.get(req.matches[1])->next(req.matches[2], request_token(req, json::object())));
           }));

  http.Post("/sessions/" + id + "/subjects/" + id + "/choices",
            guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const json body = parse_body(req);
              send_json(res, store.get(req.matches[1])->submit(req.matches[2], request_token(req, body), choice_from_json(body)));
            }));

  http.Post("/sessions/" + id + "/subjects/" + id + "/finalize",
            guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const json body = parse_body(req);
              std::optional<std::uint64_t> seed;
              if (body.contains("rng_seed")) seed = body.at("rng_seed").get<std::uint64_t>();
              const PayoutDraw draw = store.get(req.matches[1])->finalize(req.matches[2], request_token(req, body), seed);
              send_json(res, payout_json(draw));
            }));

  http.Post("/sessions/" + id + "/close", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const json body = parse_body(req);
              auto session = store.get(req.matches[1]);
              session->close(request_token(req, body));
              send_json(res, session->dashboard());
            }));

  http.Get("/sessions/" + id + "/export", guarded([&store](const httplib::Request& req, httplib::Response& res) {
             const std::string format = req.has_param("format") ? req.get_param_value("format") : "jsonl";
             auto session = store.get(req.matches[1]);
             const std::string text = session->export_text(format);
             std::string complete;
             for (const auto& s : session->snapshot().subjects) {
               if (!s.complete()) continue;
               if (!complete.empty()) complete += ',';
               complete += s.subject_id;
             }
             res.set_header("X-Complete-Subjects", complete);
             res.set_content(text, format == "csv" ? "text/csv" : "application/x-ndjson");
           }));

  http.Get("/sessions/" + id + "/dashboard", guarded([&store](const httplib::Request& req, httplib::Response& res) {
             send_json(res, store.get(req.matches[1])->dashboard());
           }));
}

int run_server(const ServerConfig& config) {
  StoreOptions options;
  options.data_dir = config.data_dir;
  options.default_seed = config.seed;
  options.fsync = config.fsync;
  SessionStore store(options);

  httplib::Server http;
  register_routes(http, store);
  std::cerr << "mpsrisk: serving " << store.ids().size() << " session(s) from " << config.data_dir << " on "
            << config.host << ":" << config.port << "\n";
  if (!http.listen(config.host, config.port)) {
    std::cerr << "mpsrisk: cannot listen on " << config.host << ":" << config.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mpsrisk
