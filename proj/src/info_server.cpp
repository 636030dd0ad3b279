#include "gridscope/info_server.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include <httplib.h>

#include "gridscope/error.hpp"

namespace gridscope::infosvc {

using nlohmann::ordered_json;

ordered_json solutions_to_json(std::span<const Solution> solutions) {
  ordered_json out = ordered_json::array();
  for (const Solution& s : solutions) {
    ordered_json row = ordered_json::object();
    for (const auto& [name, term] : s) {
      row[name] = {{"kind", to_string(term.kind())}, {"value", term.value()}};
    }
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json handle_put(InfoStore& store, std::string_view nquads) {
  std::map<std::string, std::vector<Triple>> by_context;
  for (Quad& q : parse_nquads(nquads)) {
    by_context[q.context].push_back(std::move(q.triple));
  }
  ordered_json out = ordered_json::object();
  for (const auto& [context, triples] : by_context) {
    out[context] = store.put_graph(context, triples);
  }
  return out;
}

ordered_json handle_query(const InfoStore& store, std::string_view patterns) {
  const std::vector<TriplePattern> bgp = parse_patterns(patterns);
  const std::vector<Solution> solutions = store.query(bgp);
  return solutions_to_json(solutions);
}

ordered_json handle_delete(InfoStore& store, const std::string& context) {
  return {{context, store.delete_graph(context)}};
}

namespace {

std::mutex g_server_mutex;
httplib::Server* g_server = nullptr;

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(ordered_json{{"error", message}}.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    res.set_content(fn().dump(), "application/json");
  } catch (const ParseError& e) {
    reply_error(res, 400, e.what());
  } catch (const ValidationError& e) {
    reply_error(res, 400, e.what());
  } catch (const Error& e) {
    reply_error(res, 409, e.what());
  }
}

}  // namespace

bool serve_info(InfoStore& store, const std::string& host, int port) {
  httplib::Server server;
  server.Put("/graphs", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return handle_put(store, req.body); });
  });
  server.Delete("/graphs", [&store](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("context")) {
      reply_error(res, 400, "missing context parameter");
      return;
    }
    guarded(res, [&] { return handle_delete(store, req.get_param_value("context")); });
  });
  server.Post("/query", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return handle_query(store, req.body); });
  });
  server.Get("/dump", [&store](const httplib::Request&, httplib::Response& res) {
    std::ostringstream out;
    store.save(out);
    res.set_content(out.str(), "application/n-quads");
  });

  {
    std::lock_guard lock(g_server_mutex);
    g_server = &server;
  }
  const bool ok = server.listen(host, port);
  std::lock_guard lock(g_server_mutex);
  g_server = nullptr;
  return ok;
}

void stop_info_server() {
  std::lock_guard lock(g_server_mutex);
  if (g_server != nullptr) {
    g_server->stop();
  }
}

}  // namespace gridscope::infosvc
