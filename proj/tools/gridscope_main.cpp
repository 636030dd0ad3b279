// gridscope command-line tool. Every subcommand loads the state directory,
// calls one library operation and writes the state back when it changed.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gridscope/audit.hpp"
#include "gridscope/error.hpp"
#include "gridscope/info_server.hpp"
#include "gridscope/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::string state_dir = ".gridscope";
  std::string registry_file;
  std::optional<std::uint64_t> seed;
  std::string out;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  return gridscope::read_text_file(path);
}

class Session {
 public:
  explicit Session(const GlobalOptions& g) : g_(g) {
    if (fs::exists(fs::path(g.state_dir) / "sim.json")) {
      sim_ = gridscope::Simulation::load(g.state_dir);
      return;
    }
    gridscope::Registry registry;
    if (!g.registry_file.empty()) {
      registry = gridscope::Registry::from_json(
          gridscope::parse_json_text(gridscope::read_text_file(g.registry_file), g.registry_file));
    }
    gridscope::SimulationOptions options;
    options.seed = g.seed.value_or(0);
    sim_ = std::make_unique<gridscope::Simulation>(registry, options);
  }

  gridscope::Simulation& sim() { return *sim_; }
  void save() { sim_->save(g_.state_dir); }

  void emit(const std::string& text) const {
    if (g_.out.empty()) {
      std::cout << text;
    } else {
      gridscope::write_text_file(g_.out, text);
    }
  }

 private:
  const GlobalOptions& g_;
  std::unique_ptr<gridscope::Simulation> sim_;
};

std::string lines(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) {
    out += s + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridscope: telescope network, metascheduler and information service simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--state", g.state_dir, "State directory kept between invocations");
  app.add_option("--registry", g.registry_file, "Registry document used when the state is new");
  app.add_option("--seed", g.seed, "Weather and failure seed used when the state is new");
  app.add_option("--out", g.out, "Write the command output to this file");

  std::function<void()> action;

  // resource add|list
  auto* resource = app.add_subcommand("resource", "Telescopes and compute hosts")->require_subcommand(1);
  std::string resource_doc;
  auto* resource_add = resource->add_subcommand("add", "Register a telescope or compute host");
  resource_add->add_option("document", resource_doc, "JSON entry with \"kind\": telescope|compute")
      ->required();
  resource_add->callback([&] {
    action = [&] {
      Session s(g);
      json entry = gridscope::parse_json_text(read_input(resource_doc), "resource");
      if (!entry.is_object() || !entry.contains("kind")) {
        throw gridscope::ParseError("resource entry needs a \"kind\"");
      }
      const std::string kind = entry.at("kind").get<std::string>();
      entry.erase("kind");
      json wrapper = json::object();
      if (kind == "telescope") {
        wrapper["telescopes"] = json::array({entry});
        const auto parsed = gridscope::Registry::from_json(wrapper);
        s.emit(s.sim().registry().register_telescope(*parsed.telescopes().front()) + "\n");
      } else if (kind == "compute") {
        wrapper["compute"] = json::array({entry});
        const auto parsed = gridscope::Registry::from_json(wrapper);
        s.emit(s.sim().registry().register_compute(*parsed.computes().front()) + "\n");
      } else {
        throw gridscope::ParseError("unknown resource kind '" + kind + "'");
      }
      s.save();
    };
  });
  resource->add_subcommand("list", "Print the registry document")->callback([&] {
    action = [&] {
      Session s(g);
      s.emit(s.sim().registry().to_json().dump(2) + "\n");
    };
  });

  // observe submit|schedule
  auto* observe = app.add_subcommand("observe", "Observation requests")->require_subcommand(1);
  std::string request_file;
  std::int64_t step_s = gridscope::obs::kDefaultStep.count();
  auto* observe_submit = observe->add_subcommand("submit", "Store an RTML or JSON request");
  observe_submit->add_option("request", request_file, "Request document (XML or JSON, - for stdin)")
      ->required();
  observe_submit->callback([&] {
    action = [&] {
      Session s(g);
      auto req = gridscope::obs::parse_request(read_input(request_file));
      s.emit(s.sim().submit_request(req) + "\n");
      s.save();
    };
  });
  auto* observe_schedule = observe->add_subcommand("schedule", "Build the network schedule");
  observe_schedule->add_option("request", request_file, "Request document (XML or JSON, - for stdin)")
      ->required();
  observe_schedule->add_option("--step", step_s, "Grid step in seconds")->check(CLI::PositiveNumber);
  observe_schedule->callback([&] {
    action = [&] {
      Session s(g);
      auto req = gridscope::obs::parse_request(read_input(request_file));
      const auto schedule = s.sim().schedule_request(req, gridscope::Seconds{step_s});
      s.emit(gridscope::obs::schedule_to_json(schedule).dump(2) + "\n");
      s.save();
    };
  });

  // job submit|status|cancel
  auto* job = app.add_subcommand("job", "Metascheduler jobs")->require_subcommand(1);
  std::string job_doc;
  std::string job_id;
  std::int64_t advance_s = 0;
  auto* job_submit = job->add_subcommand("submit", "Queue a job and dispatch");
  job_submit->add_option("spec", job_doc, "Job spec JSON (- for stdin)")->required();
  job_submit->callback([&] {
    action = [&] {
      Session s(g);
      const auto spec = gridscope::metasched::job_spec_from_json(
          gridscope::parse_json_text(read_input(job_doc), "job spec"));
      s.emit(s.sim().submit_job(spec) + "\n");
      s.save();
    };
  });
  auto* job_status = job->add_subcommand("status", "Print the job listing");
  job_status->add_option("--advance", advance_s, "Advance simulated time by this many seconds first")
      ->check(CLI::NonNegativeNumber);
  job_status->callback([&] {
    action = [&] {
      Session s(g);
      if (advance_s > 0) {
        s.sim().advance_to(s.sim().now() + gridscope::Seconds{advance_s});
        s.save();
      }
      s.emit(s.sim().scheduler().status_listing());
    };
  });
  auto* job_cancel = job->add_subcommand("cancel", "Cancel a pending or active job");
  job_cancel->add_option("id", job_id, "Job id")->required();
  job_cancel->callback([&] {
    action = [&] {
      Session s(g);
      s.sim().scheduler().cancel(job_id);
      s.sim().dispatch();
      s.emit(gridscope::metasched::job_to_json(s.sim().scheduler().job(job_id)).dump() + "\n");
      s.save();
    };
  });

  // vo register|approve|sync
  auto* vo = app.add_subcommand("vo", "Virtual organisation membership")->require_subcommand(1);
  std::string dn;
  std::string vo_name;
  std::string institution;
  std::string policy_file;
  auto* vo_register = vo->add_subcommand("register", "Register a membership candidate");
  vo_register->add_option("dn", dn)->required();
  vo_register->add_option("vo", vo_name)->required();
  vo_register->add_option("--institution", institution);
  vo_register->callback([&] {
    action = [&] {
      Session s(g);
      s.sim().vo().register_member(dn, vo_name, institution);
      s.save();
    };
  });
  auto* vo_approve = vo->add_subcommand("approve", "Approve a membership");
  vo_approve->add_option("dn", dn)->required();
  vo_approve->add_option("vo", vo_name)->required();
  vo_approve->callback([&] {
    action = [&] {
      Session s(g);
      s.sim().vo().approve(dn, vo_name);
      s.save();
    };
  });
  auto* vo_sync = vo->add_subcommand("sync", "Print the gridmap for a resource policy");
  vo_sync->add_option("policy", policy_file, "Policy JSON (- for stdin)")->required();
  vo_sync->callback([&] {
    action = [&] {
      Session s(g);
      const auto policy =
          gridscope::vom::policy_from_json(gridscope::parse_json_text(read_input(policy_file), "policy"));
      s.emit(gridscope::vom::render_gridmap(s.sim().vo().sync_gridmap(policy)));
      s.save();
    };
  });

  // file register|replica|find
  auto* file = app.add_subcommand("file", "Logical file catalog")->require_subcommand(1);
  std::string vpath;
  std::string owner;
  std::string se;
  std::string phys_path;
  bool remove_replica = false;
  std::string key;
  std::string value;
  std::string dir;
  auto* file_register = file->add_subcommand("register", "Register a logical file");
  file_register->add_option("vpath", vpath)->required();
  file_register->add_option("--owner", owner)->required();
  file_register->add_option("--se", se, "Storage element")->required();
  file_register->add_option("--path", phys_path, "Physical path")->required();
  file_register->callback([&] {
    action = [&] {
      Session s(g);
      const auto& f = s.sim().catalog().register_file(vpath, owner, {se, phys_path}, s.sim().now());
      s.emit(f.lfid + "\n");
      s.save();
    };
  });
  auto* file_replica = file->add_subcommand("replica", "Add or remove a replica");
  file_replica->add_option("vpath", vpath)->required();
  file_replica->add_option("--se", se)->required();
  file_replica->add_option("--path", phys_path)->required();
  file_replica->add_flag("--remove", remove_replica);
  file_replica->callback([&] {
    action = [&] {
      Session s(g);
      auto& cat = s.sim().catalog();
      const std::string lfid = cat.by_vpath(vpath).lfid;
      const std::size_t n = remove_replica ? cat.remove_replica(lfid, {se, phys_path})
                                           : cat.add_replica(lfid, {se, phys_path});
      s.emit(std::to_string(n) + "\n");
      s.save();
    };
  });
  auto* file_find = file->add_subcommand("find", "Find files by property or list a directory");
  file_find->add_option("--key", key);
  file_find->add_option("--value", value);
  file_find->add_option("--dir", dir);
  file_find->callback([&] {
    action = [&] {
      Session s(g);
      if (!dir.empty()) {
        s.emit(lines(s.sim().catalog().list_dir(dir)));
        return;
      }
      if (key.empty()) {
        throw gridscope::ParseError("file find needs --key/--value or --dir");
      }
      std::vector<std::string> found;
      for (const auto* f : s.sim().catalog().find_by_property(key, value)) {
        found.push_back(f->lfid + " " + f->vpath);
      }
      s.emit(lines(found));
    };
  });

  // info query|put|serve
  auto* info = app.add_subcommand("info", "Information service")->require_subcommand(1);
  std::string info_input;
  std::string host = "127.0.0.1";
  int port = 8750;
  auto* info_query = info->add_subcommand("query", "Run a basic graph pattern");
  info_query->add_option("patterns", info_input, "Pattern text (- for stdin)")->required();
  info_query->callback([&] {
    action = [&] {
      Session s(g);
      s.emit(gridscope::infosvc::handle_query(s.sim().store(), read_input(info_input)).dump(2) + "\n");
    };
  });
  auto* info_put = info->add_subcommand("put", "Replace the contexts named in an N-Quads document");
  info_put->add_option("nquads", info_input, "N-Quads (- for stdin)")->required();
  info_put->callback([&] {
    action = [&] {
      Session s(g);
      s.emit(gridscope::infosvc::handle_put(s.sim().store(), read_input(info_input)).dump() + "\n");
      s.save();
    };
  });
  auto* info_serve = info->add_subcommand("serve", "Serve the store over HTTP");
  info_serve->add_option("--host", host);
  info_serve->add_option("--port", port)->check(CLI::Range(1, 65535));
  info_serve->callback([&] {
    action = [&] {
      Session s(g);
      std::cerr << "serving on http://" << host << ":" << port << "\n";
      if (!gridscope::infosvc::serve_info(s.sim().store(), host, port)) {
        throw gridscope::Error("cannot listen on " + host + ":" + std::to_string(port));
      }
      s.save();
    };
  });

  // export timeline|map
  auto* exp = app.add_subcommand("export", "Monitoring exports")->require_subcommand(1);
  std::string from;
  std::string to;
  std::string at;
  bool published = false;
  double scale = gridscope::monitor::kDefaultScalePxPerMin;
  std::string format = "svg";
  auto* exp_timeline = exp->add_subcommand("timeline", "Job timeline");
  exp_timeline->add_option("--from", from, "Window start (ISO 8601)")->required();
  exp_timeline->add_option("--to", to, "Window end (ISO 8601)")->required();
  exp_timeline->add_flag("--public", published, "Omit owner and executable from labels");
  exp_timeline->add_option("--scale", scale, "Pixels per minute")->check(CLI::PositiveNumber);
  exp_timeline->add_option("--format", format)->check(CLI::IsMember({"svg", "json"}));
  exp_timeline->callback([&] {
    action = [&] {
      Session s(g);
      const auto tl = gridscope::monitor::build_timeline(
          s.sim().store(), gridscope::Instant::parse(from), gridscope::Instant::parse(to),
          published ? gridscope::monitor::Visibility::published
                    : gridscope::monitor::Visibility::internal,
          scale);
      s.emit(format == "svg" ? gridscope::monitor::render_timeline_svg(tl)
                             : gridscope::monitor::timeline_to_json(tl).dump(2) + "\n");
    };
  });
  auto* exp_map = exp->add_subcommand("map", "Telescope and resource map");
  exp_map->add_option("--at", at, "Instant (defaults to the simulated now)");
  exp_map->callback([&] {
    action = [&] {
      Session s(g);
      const gridscope::Instant t = at.empty() ? s.sim().now() : gridscope::Instant::parse(at);
      s.emit(gridscope::monitor::export_map(s.sim().registry(), t).dump(2) + "\n");
    };
  });

  // sim run
  auto* sim = app.add_subcommand("sim", "Scenario runs")->require_subcommand(1);
  std::string scenario;
  std::string artifacts_dir = "artifacts";
  auto* sim_run = sim->add_subcommand("run", "Run a scenario and write its artifacts");
  sim_run->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  sim_run->add_option("--artifacts", artifacts_dir, "Artifact directory");
  sim_run->callback([&] {
    action = [&] {
      const auto artifacts = gridscope::run_scenario_file(scenario);
      const std::string target = g.out.empty() ? artifacts_dir : g.out;
      gridscope::write_artifacts(artifacts, target);
      std::cout << lines([&] {
        std::vector<std::string> names;
        for (const auto& [name, _] : artifacts) {
          names.push_back(fs::path(target) / name);
        }
        return names;
      }());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    action();
  } catch (const gridscope::ParseError& e) {
    std::cerr << "gridscope: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gridscope: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
