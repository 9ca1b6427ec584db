#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "portcap_cli_tests";
  fs::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  auto dir = scratch_dir();
  auto out = dir / ("out" + std::to_string(counter) + ".txt");
  auto err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(PORTCAP_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  int code = status == -1 ? -1 : WEXITSTATUS(status);
  return RunResult{code, slurp(out), slurp(err)};
}

std::string fixture() {
  return std::string(PORTCAP_DATA_DIR) + "/houston_2021q4_2023q4.csv";
}

fs::path write_file(const std::string& name, const std::string& content) {
  auto p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("estimate runs the bundled fixture") {
  auto r = run_cli("estimate --input " + fixture() + " --model anchorage");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Anchorage capacity") != std::string::npos);
  CHECK(r.out.find("2022-Q4") != std::string::npos);
}

TEST_CASE("csv and json outputs are byte-identical across runs") {
  for (const char* format : {"csv", "json"}) {
    auto a = run_cli("estimate --input " + fixture() + " --format " + format);
    auto b = run_cli("estimate --input " + fixture() + " --format " + format);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("json output parses and holds all four sections") {
  auto r = run_cli("estimate --input " + fixture() + " --format json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("anchorage").size() == 9);
  CHECK(j.at("import").size() == 9);
  CHECK(j.at("export").size() == 9);
  CHECK(j.at("validation").size() == 9);
}

TEST_CASE("validate subcommand emits the yard table") {
  auto r = run_cli("validate --input " + fixture());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Yard validation") != std::string::npos);
  CHECK(r.out.find("88.64") != std::string::npos);
  CHECK(r.out.find("8.36") != std::string::npos);
}

TEST_CASE("empty observation file exits cleanly with an empty report") {
  auto p = write_file("empty.csv",
                      "window,kind,class,arrival_rate,queue_length,dwell_value,"
                      "dwell_unit,batch_mean,batch_variance,observed_wait,"
                      "observed_utilization\n");
  auto r = run_cli("estimate --input " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("empty report") != std::string::npos);
}

TEST_CASE("missing input exits with the input-error code") {
  auto r = run_cli("estimate --input /nonexistent/file.csv");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("unstable import window is flagged, not fatal") {
  auto p = write_file("unstable.csv",
                      "window,kind,class,arrival_rate,queue_length,dwell_value,"
                      "dwell_unit,batch_mean,batch_variance,observed_wait,"
                      "observed_utilization\n"
                      "w1,import,,0.056,,0,days,851.2,341458.56,,\n");
  auto r = run_cli("estimate --input " + p.string() + " --model import");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("unstable-import") != std::string::npos);
}

TEST_CASE("event-log input aggregates the requested windows") {
  std::ostringstream log;
  log << "vessel_id,cargo_class,event,timestamp\n";
  // four vessels arriving across October 2022, three entering the channel
  log << "v1,container,anchorage_arrival,2022-10-01T01:00:00Z\n";
  log << "v1,container,channel_entry,2022-10-01T13:00:00Z\n";
  log << "v2,liquid,anchorage_arrival,2022-10-02T00:00:00Z\n";
  log << "v2,liquid,channel_entry,2022-10-03T00:00:00Z\n";
  log << "v3,liquid,anchorage_arrival,2022-10-04T06:00:00Z\n";
  log << "v3,liquid,channel_entry,2022-10-05T00:00:00Z\n";
  log << "v4,container,anchorage_arrival,2022-11-20T00:00:00Z\n";
  auto p = write_file("events.csv", log.str());
  auto r = run_cli("estimate --input " + p.string() +
                   " --windows 2022-Q4 --model anchorage --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("2022-Q4") != std::string::npos);
  CHECK(r.out.find("container") != std::string::npos);
  CHECK(r.out.find("liquid") != std::string::npos);
}

TEST_CASE("simulate is deterministic per seed and honors overrides") {
  auto config = write_file("sim.json", R"({
    "topology": "multiclass-single-server",
    "arrival_rates": [0.5],
    "service_rates": [1.0],
    "horizon_hours": 2000,
    "warmup_hours": 100,
    "seed": 42
  })");
  auto a = run_cli("simulate --config " + config.string() + " --format csv");
  auto b = run_cli("simulate --config " + config.string() + " --format csv");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  auto c = run_cli("simulate --config " + config.string() +
                   " --format csv --seed 43");
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("simulate reports the analytic column next to the measurement") {
  auto config = write_file("sim2.json", R"({
    "topology": "multiclass-single-server",
    "arrival_rates": [0.5],
    "service_rates": [1.0],
    "horizon_hours": 5000,
    "warmup_hours": 200,
    "seed": 7
  })");
  auto r = run_cli("simulate --config " + config.string() + " --format json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  // the analytic value equals the library closed form for these inputs
  CHECK(j.at("queues")[0].at("analytic_wait_hours").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tandem simulation without a gate count is a usage error") {
  auto config = write_file("sim3.json", R"({
    "topology": "tandem-export",
    "arrival_rates": [5.0],
    "service_rates": [2.5, 9.0, 7.0],
    "horizon_hours": 1000
  })");
  auto r = run_cli("simulate --config " + config.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("gate count") != std::string::npos);
}

TEST_CASE("bad arguments exit with the input-error code") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("estimate").exit_code == 1);
  CHECK(run_cli("estimate --input " + fixture() + " --model bogus").exit_code ==
        1);
  CHECK(run_cli("estimate --input " + fixture() + " --format bogus").exit_code ==
        1);
}
