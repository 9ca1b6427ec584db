#pragma once

#include <optional>
#include <string>

#include "portcap/domain.hpp"
#include "portcap/export_model.hpp"
#include "portcap/import_model.hpp"

namespace portcap {

/// Yard storage capacity backed out of an inventory snapshot and the
/// utilization it represented: capacity = inventory / utilization.
struct YardCapacityEstimate {
  double capacity = 0.0;          // cargo units
  double source_inventory = 0.0;  // cargo units
  double source_utilization = 0.0;  // fraction in (0, 1]
};

YardCapacityEstimate estimate_yard_capacity(double inventory,
                                            double utilization);

enum class StabilityFlag { Stable, UnstableImport, UnstableExport, NearCritical };

/// Flag names as rendered in reports: "stable", "unstable-import",
/// "unstable-export", "near-critical".
const char* to_string(StabilityFlag flag);

/// One row of the terminal validation report: combined yard occupancy and
/// calculated vs observed utilization.
struct ValidationRow {
  std::string window_label;
  double import_queue = 0.0;  // L from the import model
  double export_queue = 0.0;  // L from the export model
  double total_queue = 0.0;
  double calculated_utilization_pct = 0.0;
  std::optional<double> observed_utilization_pct;
  std::optional<double> relative_error_pct;  // signed, (calc - obs)/obs * 100
  StabilityFlag flag = StabilityFlag::Stable;
};

/// Combines the terminal estimates for one window. The relative error is
/// omitted when no (nonzero) observed utilization is available. The flag is
/// near-critical when either traffic intensity exceeds kNearCriticalRho and
/// unstable-* when one reaches the stability margin.
ValidationRow validate_window(const ImportCapacityEstimate& import_estimate,
                              const ExportCapacityEstimate& export_estimate,
                              double yard_capacity,
                              std::optional<double> observed_utilization_pct,
                              const std::string& window_label);

}  // namespace portcap
