#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "portcap/ingest.hpp"
#include "portcap/report.hpp"

namespace {

using namespace portcap;

// Exit codes: 0 success, 1 input error, 2 solver error.
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;

void write_output(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + output_path + "'");
  out << text;
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// --windows takes either a comma-separated list of quarter labels
// ("2022-Q4,2023-Q1") or a CSV file with header label,start,end.
std::vector<Window> parse_windows_argument(const std::string& arg) {
  std::vector<Window> windows;
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::string line;
    if (!std::getline(in, line)) throw InputError(arg + ": empty windows file");
    if (line.find("label") != 0)
      throw InputError(arg + ": bad header (expected 'label,start,end')");
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty() || line == "\r") continue;
      std::istringstream ss(line);
      std::string label, start, end;
      if (!std::getline(ss, label, ',') || !std::getline(ss, start, ',') ||
          !std::getline(ss, end))
        throw InputError(arg + " row " + std::to_string(row) +
                         ": expected label,start,end");
      if (!end.empty() && end.back() == '\r') end.pop_back();
      windows.emplace_back(label, parse_iso8601_utc(start),
                           parse_iso8601_utc(end));
    }
  } else {
    std::stringstream ss(arg);
    std::string label;
    while (std::getline(ss, label, ','))
      if (!label.empty()) windows.push_back(Window::from_quarter(label));
  }
  if (windows.empty()) throw InputError("no windows given");
  return windows;
}

std::vector<ObservationBundle> load_bundles(const std::string& input,
                                            const std::string& windows_arg) {
  std::string header = first_line(input);
  if (header == kObservationHeader) return load_observation_file(input);
  if (header == kVesselEventHeader) {
    if (windows_arg.empty())
      throw InputError("event-log input requires --windows");
    auto events = load_vessel_events(input);
    std::vector<ObservationBundle> bundles;
    std::vector<std::string> warnings;
    for (const auto& window : parse_windows_argument(windows_arg)) {
      ObservationBundle bundle{window, std::nullopt, std::nullopt, std::nullopt,
                               std::nullopt};
      bundle.anchorage = aggregate_anchorage(events, window, &warnings);
      bundles.push_back(std::move(bundle));
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return bundles;
  }
  throw InputError(input + ": unrecognized header; expected an observations "
                           "file or a vessel event log");
}

int run_estimate(const std::string& input, const std::string& windows_arg,
                 const std::string& model, const std::string& format,
                 double yard_capacity, const std::string& output_path) {
  ReportOptions options;
  options.model = parse_model_selection(model);
  options.yard_capacity = yard_capacity;
  Report report = build_report(load_bundles(input, windows_arg), options);
  write_output(render_report(report, parse_output_format(format)), output_path);
  return kExitOk;
}

int run_simulate(const std::string& config_path, std::uint64_t seed,
                 bool seed_given, const std::string& format,
                 const std::string& output_path) {
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open '" + config_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    throw InputError(config_path + ": bad JSON: " + err.what());
  }
  SimConfig config = sim_config_from_json(j);
  if (seed_given) config.seed = seed;
  SimReport report = build_sim_report(config);
  write_output(render_sim_report(report, parse_output_format(format)),
               output_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "portcap: port operating capacity estimation from queue statistics"};
  app.require_subcommand(1);

  std::string input, windows_arg, model = "all", format = "table", output_path;
  double yard_capacity = 25208.0;

  auto* estimate = app.add_subcommand(
      "estimate", "Estimate operating capacities for every window");
  estimate->add_option("--input", input, "observations.csv or events.csv")
      ->required();
  estimate->add_option("--windows", windows_arg,
                       "quarter labels or windows file (event-log input)");
  estimate->add_option("--model", model,
                       "anchorage|import|export|validate|all");
  estimate->add_option("--format", format, "table|csv|json");
  estimate->add_option("--yard-capacity", yard_capacity,
                       "yard capacity in cargo units");
  estimate->add_option("--output", output_path, "write report here instead of stdout");

  auto* validate = app.add_subcommand(
      "validate", "Combined yard occupancy vs observed utilization");
  validate->add_option("--input", input, "observations.csv")->required();
  validate->add_option("--format", format, "table|csv|json");
  validate->add_option("--yard-capacity", yard_capacity,
                       "yard capacity in cargo units");
  validate->add_option("--output", output_path, "write report here instead of stdout");

  std::string sim_config_path;
  std::uint64_t seed = 0;
  auto* simulate =
      app.add_subcommand("simulate", "Run the discrete-event queue simulator");
  simulate->add_option("--config", sim_config_path, "simulation JSON config")
      ->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "override config seed");
  simulate->add_option("--format", format, "table|csv|json");
  simulate->add_option("--output", output_path, "write report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (estimate->parsed())
      return run_estimate(input, windows_arg, model, format, yard_capacity,
                          output_path);
    if (validate->parsed())
      return run_estimate(input, windows_arg, "validate", format, yard_capacity,
                          output_path);
    if (simulate->parsed())
      return run_simulate(sim_config_path, seed, seed_opt->count() > 0, format,
                          output_path);
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  } catch (const ModelError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
