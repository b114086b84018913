#pragma once
/**
 * @file server.hpp
 * @brief HTTP binding of StudyService.
 *
 *   GET  /v1/health
 *   POST /v1/sessions                      create-session  -> session
 *   GET  /v1/sessions/:id                                  -> session
 *   POST /v1/sessions/:id/next-trial                       -> trial
 *   GET  /v1/sessions/:id/frames[?pace=0]  frame stream, one frame message per line
 *                                          (application/x-ndjson, chunked, 10 Hz)
 *   POST /v1/sessions/:id/ranking          ranking         -> ranking-result
 *   GET  /v1/sessions/:id/results                          -> results
 *   GET  /v1/sessions/:id/export                           -> text/csv
 *
 * Failures answer with an "error" message whose "code" is one of
 * unknown_session (404), out_of_phase (409), study_complete (409),
 * malformed_ranking (422) or bad_request (400); unknown paths answer
 * not_found (404) and unexpected failures internal (500).
 */

#include <chrono>
#include <string>

// Eigen first: httplib pulls in <resolv.h>, whose `_res` macro breaks Eigen.
#include "xainav/session.hpp"

#include <httplib.h>

namespace xainav {

struct ServerConfig {
  std::chrono::milliseconds frame_period{100};
};

class StudyServer {
 public:
  explicit StudyServer(StudyService& service, ServerConfig cfg = {}) : service_(service), cfg_(cfg) { routes(); }

  httplib::Server& http() { return http_; }

  bool listen(const std::string& host, int port) { return http_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return http_.bind_to_any_port(host); }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  void wait_until_ready() { http_.wait_until_ready(); }
  void stop() { http_.stop(); }

 private:
  static void send_json(httplib::Response& res, const nlohmann::json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    send_json(res, wire::to_json(wire::ErrorMessage{std::string(to_string(code)), message}), http_status(code));
  }

  /// Runs `fn`, mapping service and protocol failures to error responses.
  template <typename Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const ServiceError& e) {
      send_error(res, e.code(), e.what());
    } catch (const wire::ProtocolError& e) {
      send_error(res, ErrorCode::kBadRequest, e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, ErrorCode::kBadRequest, e.what());
    }
  }

  void routes() {
    http_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"type", "health"}, {"version", wire::kProtocolVersion}, {"status", "ok"}});
    });

    http_.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto request = wire::decode<wire::CreateSessionRequest>(req.body);
        send_json(res, wire::to_json(service_.create_session(request.participant_id)), 201);
      });
    });

    http_.Get("/v1/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, wire::to_json(service_.session_info(req.path_params.at("id")))); });
    });

    http_.Post("/v1/sessions/:id/next-trial", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, wire::to_json(service_.next_trial(req.path_params.at("id")))); });
    });

    http_.Get("/v1/sessions/:id/frames", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.path_params.at("id");
        service_.require_active_trial(id);
        const bool paced = !req.has_param("pace") || req.get_param_value("pace") != "0";
        const auto period = paced ? cfg_.frame_period : std::chrono::milliseconds(0);
        res.set_chunked_content_provider("application/x-ndjson", [this, id, period](std::size_t, httplib::DataSink& sink) {
          service_.stream_frames(
              id,
              [&](const wire::FramePacket& p) {
                const std::string line = wire::encode(p) + "\n";
                return sink.is_writable() && sink.write(line.data(), line.size());
              },
              period);
          sink.done();
          return true;
        });
      });
    });

    http_.Post("/v1/sessions/:id/ranking", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto sub = wire::decode<wire::RankingSubmission>(req.body);
        send_json(res, wire::to_json(service_.submit_ranking(req.path_params.at("id"), sub)));
      });
    });

    http_.Get("/v1/sessions/:id/results", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, wire::to_json(service_.results(req.path_params.at("id")))); });
    });

    http_.Get("/v1/sessions/:id/export", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { res.set_content(service_.export_csv(req.path_params.at("id")), "text/csv"); });
    });

    http_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unexpected failure";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_json(res, wire::to_json(wire::ErrorMessage{"internal", what}), 500);
    });
    http_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const bool missing = res.status == 404;
      send_json(res, wire::to_json(wire::ErrorMessage{missing ? "not_found" : "bad_request",
                                                      missing ? "no such endpoint" : "request rejected"}),
                res.status);
    });
  }

  StudyService& service_;
  ServerConfig cfg_;
  httplib::Server http_;
};

}  // namespace xainav
