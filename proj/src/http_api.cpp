#include "gistline/error.hpp"
#include "gistline/serialize.hpp"
#include "gistline/service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace gistline::service {
namespace {

using nlohmann::json;

json outputs_json(const dialogue::AgentOutput& out) {
  json items = json::array();
  for (const auto& item : out.items) {
    json j = item;
    items.push_back(std::move(j));
  }
  return items;
}

json gists_json(const dialogue::AgentOutput& out) {
  json gists = json::array();
  for (const auto& g : out.gists) gists.push_back(g.text());
  return gists;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body.empty() ? std::string("{}") : req.body);
  if (!body.is_object()) throw PreconditionError("request body must be a JSON object");
  return body;
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw PreconditionError(std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const SessionOverError& e) {
      send_error(res, 409, e.what());
    } catch (const PreconditionError& e) {
      send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("bad request body: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

void mount_routes(httplib::Server& server, Service& service) {
  server.Post("/users", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    send_json(res, 201, json{{"user_id", service.create_user(required_string(body, "name"))}});
  }));

  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto start = service.open_session(required_string(body, "user_id"));
    send_json(res, start.resumed ? 200 : 201,
              json{{"session_id", start.session_id},
                   {"session_index", start.session_index},
                   {"resumed", start.resumed},
                   {"outputs", outputs_json(start.output)},
                   {"session_over", start.output.session_over()}});
  }));

  server.Post(R"(/sessions/([^/]+)/turns)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    std::map<std::string, double> channels;
    if (auto it = body.find("channels"); it != body.end()) {
      if (!it->is_object()) throw PreconditionError("'channels' must be an object");
      for (const auto& [name, value] : it->items()) {
        if (!value.is_number()) throw PreconditionError("channel '" + name + "' must be a number");
        channels[name] = value.get<double>();
      }
    }
    const auto out = service.post_turn(req.matches[1], required_string(body, "text"), channels);
    send_json(res, 200,
              json{{"gists", gists_json(out)}, {"outputs", outputs_json(out)}, {"session_over", out.session_over()}});
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto out = service.last_output(id).value_or(dialogue::AgentOutput{});
    send_json(res, 200,
              json{{"session_id", id}, {"outputs", outputs_json(out)}, {"session_over", service.session_over(id)}});
  }));

  server.Get(R"(/sessions/([^/]+)/transcript)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    res.set_content(service.transcript(req.matches[1]), "text/plain; charset=utf-8");
  }));

  server.Get(R"(/users/([^/]+)/progress)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto p = service.progress(req.matches[1]);
    json topics = json::array();
    for (const auto& t : p.next_topics) {
      topics.push_back(json{{"id", t.id}, {"title", t.title}, {"tier", static_cast<int>(t.tier)}});
    }
    send_json(res, 200,
              json{{"user_id", p.user_id},
                   {"sessions_completed", p.sessions_completed},
                   {"next_session", p.next_session ? json(*p.next_session) : json(nullptr)},
                   {"next_topics", topics}});
  }));
}

}  // namespace gistline::service
