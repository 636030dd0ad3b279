#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "gridscope/info_server.hpp"
#include "gridscope/simulation.hpp"

using namespace gridscope;
namespace fs = std::filesystem;

namespace {

const std::string kDir = GRIDSCOPE_SCENARIO_DIR;

struct Outcome {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    state_ = fs::temp_directory_path() /
             ("gridscope-cli-" + std::to_string(::getpid()) + "-" +
              ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(state_);
  }
  void TearDown() override {
    fs::remove_all(state_);
    fs::remove_all(state_.parent_path() / (state_.filename().string() + "-in"));
  }

  Outcome run(const std::string& args, const std::string& extra = "") const {
    const std::string cmd = std::string("'") + GRIDSCOPE_CLI + "' --state '" + state_.string() +
                            "' " + extra + " " + args + " 2>/dev/null";
    Outcome r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
      return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
      r.out.append(buf.data(), n);
    }
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  fs::path write(const std::string& name, const std::string& content) const {
    fs::create_directories(state_.parent_path() / (state_.filename().string() + "-in"));
    const fs::path p = state_.parent_path() / (state_.filename().string() + "-in") / name;
    write_text_file(p, content);
    return p;
  }

  fs::path state_;
};

}  // namespace

TEST_F(Cli, EmptyStateJobStatus) {
  const Outcome r = run("job status");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST_F(Cli, UnknownSubcommandExitsTwo) {
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("job").code, 2);
}

TEST_F(Cli, MalformedRequestExitsTwo) {
  const fs::path bad = write("bad.xml", "<RTML><Request>");
  EXPECT_EQ(run("observe submit '" + bad.string() + "'").code, 2);
}

TEST_F(Cli, ScheduleMatchesLibrary) {
  const std::string reg_file = kDir + "/handover_registry.json";
  const Outcome r = run("observe schedule '" + kDir + "/gl586a.xml'", "--registry '" + reg_file + "'");
  ASSERT_EQ(r.code, 0);
  const Registry reg = Registry::from_json(parse_json_text(read_text_file(reg_file), "registry"));
  Simulation sim(reg);
  auto req = obs::parse_request(read_text_file(kDir + "/gl586a.xml"));
  EXPECT_EQ(r.out, obs::schedule_to_json(sim.schedule_request(req)).dump(2) + "\n");
}

TEST_F(Cli, JobLifecyclePersistsAcrossInvocations) {
  const fs::path reg = write("reg.json", R"({"compute": [{"id": "host-a", "contact": "gram://a", "lrm": "fork", "slots": 1}]})");
  const fs::path spec = write("job.json", R"({"owner": "alice", "executable": "/bin/x", "runtime_s": 600})");
  const std::string extra = "--registry '" + reg.string() + "'";
  EXPECT_EQ(run("job submit '" + spec.string() + "'", extra).out, "job-000001\n");
  EXPECT_EQ(run("job submit '" + spec.string() + "'", extra).out, "job-000002\n");

  Simulation lib(Registry::from_json(parse_json_text(read_text_file(reg), "registry")));
  const auto js = metasched::job_spec_from_json(parse_json_text(read_text_file(spec), "job"));
  lib.submit_job(js);
  lib.submit_job(js);
  EXPECT_EQ(run("job status").out, lib.scheduler().status_listing());

  lib.advance_to(lib.now() + Seconds{600});
  EXPECT_EQ(run("job status --advance 600").out, lib.scheduler().status_listing());
  EXPECT_NE(run("job cancel job-000001").code, 0);
  EXPECT_EQ(run("job cancel job-000002").code, 0);
}

TEST_F(Cli, InfoQueryTwoPatterns) {
  const fs::path quads = write("q.nq",
                               "<urn:j1> <urn:hasState> \"done\" <urn:ctx:a> .\n"
                               "<urn:j1> <urn:ownedBy> \"alice\" <urn:ctx:a> .\n"
                               "<urn:j2> <urn:hasState> \"failed\" <urn:ctx:b> .\n");
  EXPECT_EQ(run("info put '" + quads.string() + "'").out, "{\"urn:ctx:a\":2,\"urn:ctx:b\":1}\n");
  const std::string bgp = "?j <urn:hasState> \"done\" .\n?j <urn:ownedBy> ?u .\n";
  const fs::path pattern = write("p.txt", bgp);
  const Outcome r = run("info query '" + pattern.string() + "'");
  ASSERT_EQ(r.code, 0);
  infosvc::InfoStore store;
  infosvc::handle_put(store, read_text_file(quads));
  EXPECT_EQ(r.out, infosvc::handle_query(store, bgp).dump(2) + "\n");
  const fs::path broken = write("broken.txt", "?j <urn:hasState>");
  EXPECT_EQ(run("info query '" + broken.string() + "'").code, 2);
}

TEST_F(Cli, VoAndFileCommands) {
  EXPECT_EQ(run("vo register /CN=alice astro").code, 0);
  EXPECT_EQ(run("vo approve /CN=alice astro").code, 0);
  const fs::path policy = write("policy.json", R"({"resource_id": "h", "allowed_vos": ["astro"], "account_prefix": "agd"})");
  EXPECT_EQ(run("vo sync '" + policy.string() + "'").out, "\"/CN=alice\" agd0001\n");
  EXPECT_EQ(run("vo sync '" + policy.string() + "'").out, "\"/CN=alice\" agd0001\n");
  EXPECT_EQ(run("file register /astro/a.fits --owner alice --se se1 --path /d/a").out, "lf-000001\n");
  EXPECT_EQ(run("file replica /astro/a.fits --se se2 --path /d/a").out, "2\n");
  EXPECT_EQ(run("file find --dir /").out, "astro/\n");
  EXPECT_NE(run("file register /astro/a.fits --owner alice --se se1 --path /d/a").code, 0);
}

TEST_F(Cli, SimRunWritesArtifacts) {
  const fs::path out = state_.parent_path() / (state_.filename().string() + "-art");
  const Outcome r = run("sim run '" + kDir + "/handover.json' --artifacts '" + out.string() + "'");
  EXPECT_EQ(r.code, 0);
  const Artifacts lib = run_scenario_file(kDir + "/handover.json");
  for (const auto& [name, content] : lib) {
    EXPECT_EQ(read_text_file(out / name), content) << name;
  }
  fs::remove_all(out);
}
