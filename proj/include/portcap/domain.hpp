#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace portcap {

/// Raised on malformed input: bad files, bad CLI arguments, bad timestamps.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a model operation is asked to evaluate outside its domain
/// (unstable regime, degenerate observation, infeasible solve).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Stability margin: a traffic intensity rho >= 1 - kStabilityEpsilon is
/// treated as unstable.
inline constexpr double kStabilityEpsilon = 1e-6;

/// Traffic intensities above this threshold are reported as near-critical
/// (the yard export process runs in this regime).
inline constexpr double kNearCriticalRho = 0.999;

enum class TimeUnit { Hours, Days };

/// A nonnegative span of time carrying its own unit. Day-denominated inputs
/// are converted to hours once, at the ingestion boundary; all model math
/// runs in hours.
struct Duration {
  double value = 0.0;
  TimeUnit unit = TimeUnit::Hours;

  Duration() = default;
  Duration(double v, TimeUnit u);

  static Duration hours(double v) { return Duration(v, TimeUnit::Hours); }
  static Duration days(double v) { return Duration(v, TimeUnit::Days); }
};

/// Duration in hours; days convert by exactly 24.
double to_hours(const Duration& d);

/// A nonnegative, finite per-hour rate (vessels/hour or cargo/hour).
class Rate {
 public:
  Rate() = default;
  explicit Rate(double per_hour);

  double per_hour() const { return per_hour_; }

 private:
  double per_hour_ = 0.0;
};

/// rho = total_arrival / service. Does not enforce rho < 1; callers decide
/// what to do with an unstable ratio.
double traffic_intensity(Rate total_arrival, Rate service);

/// One cargo class (container, break-bulk, liquid, ...). The unit label
/// documents what "one cargo unit" means for the class.
struct CargoClass {
  std::string name;
  std::string unit_label;

  CargoClass() = default;
  explicit CargoClass(std::string n, std::string unit = "");
};

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (UTC, optional fractional seconds, which
/// are truncated). Throws InputError on anything else.
Timestamp parse_iso8601_utc(const std::string& text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(Timestamp t);

/// A labeled observation interval. All rates produced for a window are per
/// hour within it.
class Window {
 public:
  Window(std::string label, Timestamp start, Timestamp end);

  /// Builds a calendar quarter from a "YYYY-Qn" label (UTC boundaries).
  static Window from_quarter(const std::string& label);

  /// Synthetic window of the given length starting at the epoch; used for
  /// pre-aggregated observations where only the label matters.
  static Window from_hours(std::string label, double hours);

  const std::string& label() const { return label_; }
  Timestamp start() const { return start_; }
  Timestamp end() const { return end_; }
  double duration_hours() const { return duration_hours_; }

  /// Half-open membership test: start <= t < end.
  bool contains(Timestamp t) const { return start_ <= t && t < end_; }

 private:
  std::string label_;
  Timestamp start_{};
  Timestamp end_{};
  double duration_hours_ = 0.0;
};

}  // namespace portcap
