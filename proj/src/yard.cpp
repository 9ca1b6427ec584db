#include "portcap/yard.hpp"

#include <cmath>

namespace portcap {

YardCapacityEstimate estimate_yard_capacity(double inventory,
                                            double utilization) {
  if (!std::isfinite(inventory) || inventory <= 0.0)
    throw ModelError("yard inventory must be positive");
  if (!std::isfinite(utilization) || utilization <= 0.0 || utilization > 1.0)
    throw ModelError("yard utilization must lie in (0, 1]");
  return YardCapacityEstimate{inventory / utilization, inventory, utilization};
}

const char* to_string(StabilityFlag flag) {
  switch (flag) {
    case StabilityFlag::Stable: return "stable";
    case StabilityFlag::UnstableImport: return "unstable-import";
    case StabilityFlag::UnstableExport: return "unstable-export";
    case StabilityFlag::NearCritical: return "near-critical";
  }
  return "unknown";
}

ValidationRow validate_window(const ImportCapacityEstimate& import_estimate,
                              const ExportCapacityEstimate& export_estimate,
                              double yard_capacity,
                              std::optional<double> observed_utilization_pct,
                              const std::string& window_label) {
  if (!std::isfinite(yard_capacity) || yard_capacity <= 0.0)
    throw ModelError("yard capacity must be positive");

  ValidationRow row;
  row.window_label = window_label;
  row.import_queue = import_estimate.predicted_queue_length;
  row.export_queue = export_estimate.predicted_queue_length;
  row.total_queue = row.import_queue + row.export_queue;
  row.calculated_utilization_pct = row.total_queue / yard_capacity * 100.0;
  row.observed_utilization_pct = observed_utilization_pct;
  if (observed_utilization_pct && *observed_utilization_pct != 0.0)
    row.relative_error_pct =
        (row.calculated_utilization_pct - *observed_utilization_pct) /
        *observed_utilization_pct * 100.0;

  double rho_import = import_estimate.traffic_intensity;
  double rho_export = export_estimate.traffic_intensity;
  if (rho_import >= 1.0 - kStabilityEpsilon)
    row.flag = StabilityFlag::UnstableImport;
  else if (rho_export >= 1.0 - kStabilityEpsilon)
    row.flag = StabilityFlag::UnstableExport;
  else if (rho_import > kNearCriticalRho || rho_export > kNearCriticalRho)
    row.flag = StabilityFlag::NearCritical;
  else
    row.flag = StabilityFlag::Stable;
  return row;
}

}  // namespace portcap
