#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "portcap/anchorage.hpp"
#include "portcap/export_model.hpp"
#include "portcap/import_model.hpp"
#include "portcap/ingest.hpp"
#include "portcap/simulator.hpp"
#include "portcap/yard.hpp"

namespace portcap {

enum class OutputFormat { Table, Csv, Json };
OutputFormat parse_output_format(const std::string& text);

enum class ModelSelection { Anchorage, Import, Export, Validate, All };
ModelSelection parse_model_selection(const std::string& text);

struct ReportOptions {
  ModelSelection model = ModelSelection::All;
  double yard_capacity = 25208.0;  // estimated BCT yard capacity, cargo units
};

/// One estimated window of the anchorage table. `error` is set (and the
/// estimate absent) when the window admits no stable fit.
struct AnchorageReportRow {
  std::string window;
  std::vector<AnchorageClassObservation> classes;
  std::optional<double> observed_wait_hours;
  std::optional<AnchorageCapacityEstimate> estimate;
  std::string error;
};

struct ImportReportRow {
  std::string window;
  double arrival_rate = 0.0;
  double batch_mean = 0.0;
  double batch_second_moment = 0.0;
  double dwell_hours = 0.0;
  std::optional<ImportCapacityEstimate> estimate;
  StabilityFlag flag = StabilityFlag::Stable;
  std::string error;
};

struct ExportReportRow {
  std::string window;
  double yard_arrival_rate = 0.0;
  double dwell_hours = 0.0;
  std::optional<ExportCapacityEstimate> estimate;
  StabilityFlag flag = StabilityFlag::Stable;
  std::string error;
};

struct ValidationReportRow {
  std::string window;
  std::optional<ValidationRow> row;
  StabilityFlag flag = StabilityFlag::Stable;
  std::string error;
};

struct Report {
  std::vector<AnchorageReportRow> anchorage;
  std::vector<ImportReportRow> imports;
  std::vector<ExportReportRow> exports;
  std::vector<ValidationReportRow> validation;
};

bool operator==(const AnchorageReportRow&, const AnchorageReportRow&);
bool operator==(const ImportReportRow&, const ImportReportRow&);
bool operator==(const ExportReportRow&, const ExportReportRow&);
bool operator==(const ValidationReportRow&, const ValidationReportRow&);
bool operator==(const Report&, const Report&);

/// Runs the selected solvers over every window. Windows that fail a solve
/// become flagged rows, never process failures.
Report build_report(const std::vector<ObservationBundle>& bundles,
                    const ReportOptions& options);

/// Renders tables at report precision (rates and intensities to two
/// decimals, queue lengths to integers, percents to two decimals); csv and
/// json carry full precision.
std::string render_report(const Report& report, OutputFormat format);

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// Simulation report: measured statistics next to the matching closed-form
/// values (absent for stages without an analytic counterpart).
struct SimAnalyticValue {
  std::string label;
  std::optional<double> wait_hours;
  std::optional<double> queue_length;
};

struct SimReport {
  Topology topology = Topology::MulticlassSingleServer;
  std::uint64_t seed = 0;
  SimResult result;
  std::vector<SimAnalyticValue> analytic;  // aligned with result.queues
};

SimReport build_sim_report(const SimConfig& config);
std::string render_sim_report(const SimReport& report, OutputFormat format);

const char* to_string(Topology topology);
Topology parse_topology(const std::string& text);

/// Parses a simulation config from JSON (the --config file of the CLI).
SimConfig sim_config_from_json(const nlohmann::json& j);

}  // namespace portcap
