#pragma once

#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gridscope/infosvc.hpp"

namespace gridscope::infosvc {

// [{"?var": {"kind": "...", "value": "..."}}, ...]
nlohmann::ordered_json solutions_to_json(std::span<const Solution> solutions);

// Request handlers shared by the HTTP endpoint and the CLI.
//   put:    body is N-Quads; each context named in the body is replaced.
//   query:  body is pattern text; returns the JSON solutions encoding.
//   delete: removes one context.
// Returns the number of triples stored per context, as JSON {"context": count}.
nlohmann::ordered_json handle_put(InfoStore& store, std::string_view nquads);
nlohmann::ordered_json handle_query(const InfoStore& store, std::string_view patterns);
nlohmann::ordered_json handle_delete(InfoStore& store, const std::string& context);

// Blocking HTTP service:
//   PUT    /graphs          N-Quads body
//   DELETE /graphs?context=<iri>
//   POST   /query           pattern text body
//   GET    /dump            whole store as N-Quads
// Returns when stop_info_server() is called or binding fails (false).
bool serve_info(InfoStore& store, const std::string& host, int port);
void stop_info_server();

}  // namespace gridscope::infosvc
