#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>

#include "gridscope/audit.hpp"
#include "gridscope/ephemeris.hpp"
#include "gridscope/error.hpp"
#include "gridscope/info_server.hpp"
#include "gridscope/monitor.hpp"
#include "gridscope/simulation.hpp"

namespace py = pybind11;
using namespace gridscope;
using nlohmann::json;

namespace {

Registry registry_from_text(const std::string& text) {
  return text.empty() ? Registry{} : Registry::from_json(parse_json_text(text, "registry"));
}

class PySimulation {
 public:
  PySimulation(const std::string& registry_json, std::uint64_t seed, const std::string& start,
               double failure_probability)
      : sim_(std::make_unique<Simulation>(
            registry_from_text(registry_json),
            SimulationOptions{seed, start.empty() ? kDefaultSimStart : Instant::parse(start),
                              failure_probability})) {}

  std::string now() const { return sim_->now().iso(); }
  std::string submit_job(const std::string& spec_json) {
    return sim_->submit_job(metasched::job_spec_from_json(parse_json_text(spec_json, "job spec")));
  }
  void cancel_job(const std::string& id) {
    sim_->scheduler().cancel(id);
    sim_->dispatch();
  }
  void advance(std::int64_t seconds) { sim_->advance_to(sim_->now() + Seconds{seconds}); }
  std::size_t keep_filled(std::size_t target, const std::string& template_json) {
    const std::size_t n = sim_->scheduler().keep_filled(
        target, metasched::job_spec_from_json(parse_json_text(template_json, "job template")));
    sim_->dispatch();
    return n;
  }
  std::string job_status() const { return sim_->scheduler().status_listing(); }
  std::string schedule(const std::string& request, std::int64_t step_s) {
    auto req = obs::parse_request(request);
    return obs::schedule_to_json(sim_->schedule_request(req, Seconds{step_s})).dump();
  }
  std::string query(const std::string& patterns) const {
    return infosvc::handle_query(sim_->store(), patterns).dump();
  }
  std::string timeline(const std::string& from, const std::string& to, bool published,
                       double scale, const std::string& format) const {
    const auto tl = monitor::build_timeline(
        sim_->store(), Instant::parse(from), Instant::parse(to),
        published ? monitor::Visibility::published : monitor::Visibility::internal, scale);
    return format == "json" ? monitor::timeline_to_json(tl).dump()
                            : monitor::render_timeline_svg(tl);
  }
  std::string export_map(const std::string& at) const {
    return monitor::export_map(sim_->registry(), at.empty() ? sim_->now() : Instant::parse(at)).dump();
  }
  void save(const std::string& dir) const { sim_->save(dir); }

 private:
  std::unique_ptr<Simulation> sim_;
};

}  // namespace

PYBIND11_MODULE(_gridscope, m) {
  m.doc() = "gridscope core bindings; structured results are returned as JSON text";

  // Translators run newest first, so the base class is registered before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());

  m.def(
      "alt_az",
      [](double ra, double dec, double lat, double lon, const std::string& at) {
        const auto h = ephemeris::alt_az(ephemeris::EquatorialCoord(ra, dec),
                                         ephemeris::GeoLocation(lat, lon), Instant::parse(at));
        return std::make_pair(h.altitude, h.azimuth);
      },
      py::arg("ra_deg"), py::arg("dec_deg"), py::arg("lat_deg"), py::arg("lon_deg"), py::arg("at"));
  m.def(
      "subsolar_point",
      [](const std::string& at) {
        const auto p = ephemeris::subsolar_point(Instant::parse(at));
        return std::make_pair(p.lat(), p.lon());
      },
      py::arg("at"));
  m.def(
      "parse_request", [](const std::string& doc) { return obs::request_to_json(obs::parse_request(doc)).dump(); },
      py::arg("document"));
  m.def(
      "build_schedule",
      [](const std::string& registry_json, const std::string& request, std::int64_t step_s) {
        const Registry reg = registry_from_text(registry_json);
        const auto req = obs::parse_request(request);
        return obs::schedule_to_json(obs::build_schedule(reg, req, Seconds{step_s})).dump();
      },
      py::arg("registry_json"), py::arg("request"), py::arg("step_s") = obs::kDefaultStep.count());
  m.def(
      "sync_gridmap",
      [](const std::string& vo_json, const std::string& policy_json) {
        auto vo = vom::VORegistry::from_json(parse_json_text(vo_json, "VO registry"));
        const auto policy = vom::policy_from_json(parse_json_text(policy_json, "policy"));
        const std::string gridmap = vom::render_gridmap(vo.sync_gridmap(policy));
        return std::make_pair(gridmap, vo.to_json().dump());
      },
      py::arg("vo_json"), py::arg("policy_json"));
  m.def(
      "run_scenario",
      [](const std::string& path) {
        py::gil_scoped_release release;
        return run_scenario_file(path);
      },
      py::arg("path"));

  py::class_<infosvc::InfoStore>(m, "InfoStore")
      .def(py::init<>())
      .def("put", [](infosvc::InfoStore& s, const std::string& nquads) { return infosvc::handle_put(s, nquads).dump(); })
      .def("query", [](const infosvc::InfoStore& s, const std::string& patterns) { return infosvc::handle_query(s, patterns).dump(); })
      .def("delete", [](infosvc::InfoStore& s, const std::string& ctx) { return infosvc::handle_delete(s, ctx).dump(); })
      .def("dump", [](const infosvc::InfoStore& s) { return infosvc::write_nquads(s.quads()); })
      .def("__len__", &infosvc::InfoStore::size);

  py::class_<PySimulation>(m, "Simulation")
      .def(py::init<const std::string&, std::uint64_t, const std::string&, double>(),
           py::arg("registry_json") = "", py::arg("seed") = 0, py::arg("start") = "",
           py::arg("failure_probability") = 0.0)
      .def_property_readonly("now", &PySimulation::now)
      .def("submit_job", &PySimulation::submit_job, py::arg("spec_json"))
      .def("cancel_job", &PySimulation::cancel_job, py::arg("job_id"))
      .def("advance", &PySimulation::advance, py::arg("seconds"))
      .def("keep_filled", &PySimulation::keep_filled, py::arg("target"), py::arg("template_json"))
      .def("job_status", &PySimulation::job_status)
      .def("schedule", &PySimulation::schedule, py::arg("request"),
           py::arg("step_s") = obs::kDefaultStep.count())
      .def("query", &PySimulation::query, py::arg("patterns"))
      .def("timeline", &PySimulation::timeline, py::arg("start"), py::arg("end"),
           py::arg("public") = false, py::arg("scale") = monitor::kDefaultScalePxPerMin,
           py::arg("format") = "svg")
      .def("export_map", &PySimulation::export_map, py::arg("at") = "")
      .def("save", &PySimulation::save, py::arg("directory"));
}
