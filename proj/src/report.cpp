#include "portcap/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace portcap {

OutputFormat parse_output_format(const std::string& text) {
  if (text == "table") return OutputFormat::Table;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw InputError("unknown output format '" + text +
                   "' (expected table, csv or json)");
}

ModelSelection parse_model_selection(const std::string& text) {
  if (text == "anchorage") return ModelSelection::Anchorage;
  if (text == "import") return ModelSelection::Import;
  if (text == "export") return ModelSelection::Export;
  if (text == "validate") return ModelSelection::Validate;
  if (text == "all") return ModelSelection::All;
  throw InputError("unknown model '" + text +
                   "' (expected anchorage, import, export, validate or all)");
}

const char* to_string(Topology topology) {
  switch (topology) {
    case Topology::MulticlassSingleServer: return "multiclass-single-server";
    case Topology::BatchSingleServer: return "batch-single-server";
    case Topology::TandemExport: return "tandem-export";
  }
  return "unknown";
}

Topology parse_topology(const std::string& text) {
  if (text == "multiclass-single-server") return Topology::MulticlassSingleServer;
  if (text == "batch-single-server") return Topology::BatchSingleServer;
  if (text == "tandem-export") return Topology::TandemExport;
  throw InputError("unknown topology '" + text +
                   "' (expected multiclass-single-server, batch-single-server "
                   "or tandem-export)");
}

namespace {

std::string fmt_fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

// Shortest representation that parses back to the same double.
std::string fmt_full(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

// Table-style traffic intensity; values beyond the near-critical threshold
// print as "~1" the way the source tables do.
std::string fmt_rho(double rho) {
  return rho > kNearCriticalRho && rho < 1.0 ? "~1" : fmt_fixed(rho, 2);
}

bool eq(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool eq(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || eq(*a, *b);
}

}  // namespace

bool operator==(const AnchorageReportRow& a, const AnchorageReportRow& b) {
  if (a.window != b.window || a.error != b.error ||
      !eq(a.observed_wait_hours, b.observed_wait_hours) ||
      a.classes.size() != b.classes.size() ||
      a.estimate.has_value() != b.estimate.has_value())
    return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    if (a.classes[i].cargo_class.name != b.classes[i].cargo_class.name ||
        a.classes[i].cargo_class.unit_label != b.classes[i].cargo_class.unit_label ||
        !eq(a.classes[i].arrival_rate.per_hour(), b.classes[i].arrival_rate.per_hour()) ||
        !eq(a.classes[i].mean_queue_length, b.classes[i].mean_queue_length))
      return false;
  }
  if (a.estimate) {
    const auto& x = *a.estimate;
    const auto& y = *b.estimate;
    if (!eq(x.service_rate.per_hour(), y.service_rate.per_hour()) ||
        !eq(x.traffic_intensity, y.traffic_intensity) ||
        !eq(x.predicted_wait_hours, y.predicted_wait_hours) ||
        !eq(x.residual, y.residual) ||
        !eq(x.observed_wait_relative_error_pct, y.observed_wait_relative_error_pct) ||
        x.predicted_queue_lengths.size() != y.predicted_queue_lengths.size())
      return false;
    for (std::size_t i = 0; i < x.predicted_queue_lengths.size(); ++i)
      if (!eq(x.predicted_queue_lengths[i], y.predicted_queue_lengths[i]))
        return false;
  }
  return true;
}

bool operator==(const ImportReportRow& a, const ImportReportRow& b) {
  if (a.window != b.window || a.error != b.error || a.flag != b.flag ||
      !eq(a.arrival_rate, b.arrival_rate) || !eq(a.batch_mean, b.batch_mean) ||
      !eq(a.batch_second_moment, b.batch_second_moment) ||
      !eq(a.dwell_hours, b.dwell_hours) ||
      a.estimate.has_value() != b.estimate.has_value())
    return false;
  if (a.estimate) {
    return eq(a.estimate->service_rate.per_hour(), b.estimate->service_rate.per_hour()) &&
           eq(a.estimate->traffic_intensity, b.estimate->traffic_intensity) &&
           eq(a.estimate->predicted_queue_length, b.estimate->predicted_queue_length);
  }
  return true;
}

bool operator==(const ExportReportRow& a, const ExportReportRow& b) {
  if (a.window != b.window || a.error != b.error || a.flag != b.flag ||
      !eq(a.yard_arrival_rate, b.yard_arrival_rate) ||
      !eq(a.dwell_hours, b.dwell_hours) ||
      a.estimate.has_value() != b.estimate.has_value())
    return false;
  if (a.estimate) {
    return eq(a.estimate->service_rate.per_hour(), b.estimate->service_rate.per_hour()) &&
           eq(a.estimate->traffic_intensity, b.estimate->traffic_intensity) &&
           eq(a.estimate->predicted_queue_length, b.estimate->predicted_queue_length);
  }
  return true;
}

bool operator==(const ValidationReportRow& a, const ValidationReportRow& b) {
  if (a.window != b.window || a.error != b.error || a.flag != b.flag ||
      a.row.has_value() != b.row.has_value())
    return false;
  if (a.row) {
    const auto& x = *a.row;
    const auto& y = *b.row;
    return x.window_label == y.window_label && eq(x.import_queue, y.import_queue) &&
           eq(x.export_queue, y.export_queue) && eq(x.total_queue, y.total_queue) &&
           eq(x.calculated_utilization_pct, y.calculated_utilization_pct) &&
           eq(x.observed_utilization_pct, y.observed_utilization_pct) &&
           eq(x.relative_error_pct, y.relative_error_pct) && x.flag == y.flag;
  }
  return true;
}

bool operator==(const Report& a, const Report& b) {
  return a.anchorage == b.anchorage && a.imports == b.imports &&
         a.exports == b.exports && a.validation == b.validation;
}

Report build_report(const std::vector<ObservationBundle>& bundles,
                    const ReportOptions& options) {
  const ModelSelection m = options.model;
  const bool want_anchorage =
      m == ModelSelection::Anchorage || m == ModelSelection::All;
  const bool want_import = m == ModelSelection::Import || m == ModelSelection::All;
  const bool want_export = m == ModelSelection::Export || m == ModelSelection::All;
  const bool want_validate =
      m == ModelSelection::Validate || m == ModelSelection::All;

  Report report;
  for (const auto& bundle : bundles) {
    const std::string& label = bundle.window.label();

    if (want_anchorage && bundle.anchorage) {
      AnchorageReportRow row;
      row.window = label;
      row.classes = bundle.anchorage->classes;
      row.observed_wait_hours = bundle.anchorage->observed_mean_wait_hours;
      try {
        row.estimate = solve_port_capacity(*bundle.anchorage);
      } catch (const ModelError& err) {
        row.error = err.what();
      }
      report.anchorage.push_back(std::move(row));
    }

    std::optional<ImportCapacityEstimate> import_estimate;
    std::string import_error;
    if ((want_import || want_validate) && bundle.import_obs) {
      try {
        import_estimate = solve_import_capacity(*bundle.import_obs);
      } catch (const ModelError& err) {
        import_error = err.what();
      }
    }
    if (want_import && bundle.import_obs) {
      ImportReportRow row;
      row.window = label;
      row.arrival_rate = bundle.import_obs->vessel_arrival_rate.per_hour();
      row.batch_mean = bundle.import_obs->batch.mean;
      row.batch_second_moment = bundle.import_obs->batch.second_moment;
      row.dwell_hours = to_hours(bundle.import_obs->dwell_time);
      row.estimate = import_estimate;
      row.error = import_error;
      if (!import_estimate)
        row.flag = StabilityFlag::UnstableImport;
      else if (import_estimate->traffic_intensity > kNearCriticalRho)
        row.flag = StabilityFlag::NearCritical;
      report.imports.push_back(std::move(row));
    }

    std::optional<ExportCapacityEstimate> export_estimate;
    std::string export_error;
    if ((want_export || want_validate) && bundle.export_obs) {
      try {
        export_estimate = solve_export_capacity(*bundle.export_obs);
      } catch (const ModelError& err) {
        export_error = err.what();
      }
    }
    if (want_export && bundle.export_obs) {
      ExportReportRow row;
      row.window = label;
      row.yard_arrival_rate =
          bundle.export_obs->effective_yard_rate().per_hour();
      row.dwell_hours = to_hours(bundle.export_obs->dwell_time);
      row.estimate = export_estimate;
      row.error = export_error;
      if (!export_estimate)
        row.flag = StabilityFlag::UnstableExport;
      else if (export_estimate->traffic_intensity > kNearCriticalRho)
        row.flag = StabilityFlag::NearCritical;
      report.exports.push_back(std::move(row));
    }

    if (want_validate && bundle.import_obs && bundle.export_obs) {
      ValidationReportRow row;
      row.window = label;
      if (import_estimate && export_estimate) {
        row.row = validate_window(*import_estimate, *export_estimate,
                                  options.yard_capacity,
                                  bundle.observed_utilization_pct, label);
        row.flag = row.row->flag;
      } else if (!import_estimate) {
        row.flag = StabilityFlag::UnstableImport;
        row.error = "import model: " + import_error;
      } else {
        row.flag = StabilityFlag::UnstableExport;
        row.error = "export model: " + export_error;
      }
      report.validation.push_back(std::move(row));
    }
  }
  return report;
}

namespace {

void render_anchorage_table(const Report& report, std::ostringstream& out) {
  out << "== Anchorage capacity ==\n";
  out << std::left << std::setw(10) << "window" << std::setw(12) << "class"
      << std::right << std::setw(8) << "lambda" << std::setw(9) << "L_obs"
      << std::setw(9) << "L_pred" << std::setw(7) << "mu" << std::setw(7)
      << "rho" << std::setw(9) << "W_calc" << std::setw(9) << "W_obs"
      << std::setw(9) << "err_pct" << "  note\n";
  for (const auto& row : report.anchorage) {
    for (std::size_t i = 0; i < row.classes.size(); ++i) {
      const auto& c = row.classes[i];
      out << std::left << std::setw(10) << (i == 0 ? row.window : "")
          << std::setw(12) << c.cargo_class.name << std::right << std::setw(8)
          << fmt_fixed(c.arrival_rate.per_hour(), 2) << std::setw(9)
          << fmt_fixed(c.mean_queue_length, 2);
      if (row.estimate)
        out << std::setw(9) << fmt_fixed(row.estimate->predicted_queue_lengths[i], 2);
      else
        out << std::setw(9) << "-";
      if (i == 0) {
        if (row.estimate) {
          out << std::setw(7) << fmt_fixed(row.estimate->service_rate.per_hour(), 2)
              << std::setw(7) << fmt_fixed(row.estimate->traffic_intensity, 2)
              << std::setw(9) << fmt_fixed(row.estimate->predicted_wait_hours, 2);
        } else {
          out << std::setw(7) << "-" << std::setw(7) << "-" << std::setw(9) << "-";
        }
        out << std::setw(9)
            << (row.observed_wait_hours ? fmt_fixed(*row.observed_wait_hours, 2)
                                        : std::string("n/a"));
        out << std::setw(9)
            << (row.estimate && row.estimate->observed_wait_relative_error_pct
                    ? fmt_fixed(*row.estimate->observed_wait_relative_error_pct, 2)
                    : std::string("n/a"));
        if (!row.error.empty()) out << "  " << row.error;
      }
      out << "\n";
    }
  }
}

void render_import_table(const Report& report, std::ostringstream& out) {
  out << "== Import capacity ==\n";
  out << std::left << std::setw(10) << "window" << std::right << std::setw(9)
      << "lambda" << std::setw(10) << "E[X]" << std::setw(14) << "E[X^2]"
      << std::setw(10) << "dwell_h" << std::setw(9) << "mu" << std::setw(7)
      << "rho" << std::setw(9) << "L_pred" << "  status\n";
  for (const auto& row : report.imports) {
    out << std::left << std::setw(10) << row.window << std::right
        << std::setw(9) << fmt_fixed(row.arrival_rate, 3) << std::setw(10)
        << fmt_fixed(row.batch_mean, 1) << std::setw(14)
        << fmt_full(row.batch_second_moment) << std::setw(10)
        << fmt_fixed(row.dwell_hours, 2);
    if (row.estimate) {
      out << std::setw(9) << fmt_fixed(row.estimate->service_rate.per_hour(), 2)
          << std::setw(7) << fmt_rho(row.estimate->traffic_intensity)
          << std::setw(9) << fmt_fixed(row.estimate->predicted_queue_length, 0);
    } else {
      out << std::setw(9) << "-" << std::setw(7) << "-" << std::setw(9) << "-";
    }
    out << "  " << to_string(row.flag);
    if (!row.error.empty()) out << ": " << row.error;
    out << "\n";
  }
}

void render_export_table(const Report& report, std::ostringstream& out) {
  out << "== Export capacity ==\n";
  out << std::left << std::setw(10) << "window" << std::right << std::setw(9)
      << "lambda" << std::setw(10) << "dwell_h" << std::setw(9) << "mu"
      << std::setw(7) << "rho" << std::setw(9) << "L_pred" << "  status\n";
  for (const auto& row : report.exports) {
    out << std::left << std::setw(10) << row.window << std::right
        << std::setw(9) << fmt_fixed(row.yard_arrival_rate, 2) << std::setw(10)
        << fmt_fixed(row.dwell_hours, 2);
    if (row.estimate) {
      out << std::setw(9) << fmt_fixed(row.estimate->service_rate.per_hour(), 2)
          << std::setw(7) << fmt_rho(row.estimate->traffic_intensity)
          << std::setw(9) << fmt_fixed(row.estimate->predicted_queue_length, 0);
    } else {
      out << std::setw(9) << "-" << std::setw(7) << "-" << std::setw(9) << "-";
    }
    out << "  " << to_string(row.flag);
    if (!row.error.empty()) out << ": " << row.error;
    out << "\n";
  }
}

void render_validation_table(const Report& report, std::ostringstream& out) {
  out << "== Yard validation ==\n";
  out << std::left << std::setw(10) << "window" << std::right << std::setw(9)
      << "L_imp" << std::setw(9) << "L_exp" << std::setw(9) << "L_total"
      << std::setw(12) << "Y_calc_pct" << std::setw(11) << "Y_obs_pct"
      << std::setw(9) << "err_pct" << "  status\n";
  for (const auto& row : report.validation) {
    out << std::left << std::setw(10) << row.window << std::right;
    if (row.row) {
      out << std::setw(9) << fmt_fixed(row.row->import_queue, 0) << std::setw(9)
          << fmt_fixed(row.row->export_queue, 0) << std::setw(9)
          << fmt_fixed(row.row->total_queue, 0) << std::setw(12)
          << fmt_fixed(row.row->calculated_utilization_pct, 2) << std::setw(11)
          << (row.row->observed_utilization_pct
                  ? fmt_fixed(*row.row->observed_utilization_pct, 2)
                  : std::string("n/a"))
          << std::setw(9)
          << (row.row->relative_error_pct
                  ? fmt_fixed(*row.row->relative_error_pct, 2)
                  : std::string("n/a"));
    } else {
      out << std::setw(9) << "-" << std::setw(9) << "-" << std::setw(9) << "-"
          << std::setw(12) << "-" << std::setw(11) << "-" << std::setw(9) << "-";
    }
    out << "  " << to_string(row.flag);
    if (!row.error.empty()) out << ": " << row.error;
    out << "\n";
  }
}

int section_count(const Report& r) {
  return (r.anchorage.empty() ? 0 : 1) + (r.imports.empty() ? 0 : 1) +
         (r.exports.empty() ? 0 : 1) + (r.validation.empty() ? 0 : 1);
}

void render_csv(const Report& report, std::ostringstream& out) {
  const bool multi = section_count(report) > 1;
  if (!report.anchorage.empty()) {
    if (multi) out << "# anchorage\n";
    out << "window,class,arrival_rate,queue_observed,queue_predicted,"
           "service_rate,traffic_intensity,wait_calculated_hours,"
           "wait_observed_hours,relative_error_pct,residual,status\n";
    for (const auto& row : report.anchorage) {
      for (std::size_t i = 0; i < row.classes.size(); ++i) {
        const auto& c = row.classes[i];
        out << row.window << ',' << c.cargo_class.name << ','
            << fmt_full(c.arrival_rate.per_hour()) << ','
            << fmt_full(c.mean_queue_length) << ',';
        if (row.estimate) out << fmt_full(row.estimate->predicted_queue_lengths[i]);
        out << ',';
        if (row.estimate)
          out << fmt_full(row.estimate->service_rate.per_hour()) << ','
              << fmt_full(row.estimate->traffic_intensity) << ','
              << fmt_full(row.estimate->predicted_wait_hours) << ',';
        else
          out << ",,,";
        if (row.observed_wait_hours) out << fmt_full(*row.observed_wait_hours);
        out << ',';
        if (row.estimate && row.estimate->observed_wait_relative_error_pct)
          out << fmt_full(*row.estimate->observed_wait_relative_error_pct);
        out << ',';
        if (row.estimate) out << fmt_full(row.estimate->residual);
        out << ',' << (row.error.empty() ? "ok" : csv_safe(row.error)) << '\n';
      }
    }
  }
  if (!report.imports.empty()) {
    if (multi) out << "# import\n";
    out << "window,arrival_rate,batch_mean,batch_second_moment,dwell_hours,"
           "service_rate,traffic_intensity,queue_predicted,status\n";
    for (const auto& row : report.imports) {
      out << row.window << ',' << fmt_full(row.arrival_rate) << ','
          << fmt_full(row.batch_mean) << ',' << fmt_full(row.batch_second_moment)
          << ',' << fmt_full(row.dwell_hours) << ',';
      if (row.estimate)
        out << fmt_full(row.estimate->service_rate.per_hour()) << ','
            << fmt_full(row.estimate->traffic_intensity) << ','
            << fmt_full(row.estimate->predicted_queue_length) << ',';
      else
        out << ",,,";
      out << to_string(row.flag);
      if (!row.error.empty()) out << ": " << csv_safe(row.error);
      out << '\n';
    }
  }
  if (!report.exports.empty()) {
    if (multi) out << "# export\n";
    out << "window,yard_arrival_rate,dwell_hours,service_rate,"
           "traffic_intensity,queue_predicted,status\n";
    for (const auto& row : report.exports) {
      out << row.window << ',' << fmt_full(row.yard_arrival_rate) << ','
          << fmt_full(row.dwell_hours) << ',';
      if (row.estimate)
        out << fmt_full(row.estimate->service_rate.per_hour()) << ','
            << fmt_full(row.estimate->traffic_intensity) << ','
            << fmt_full(row.estimate->predicted_queue_length) << ',';
      else
        out << ",,,";
      out << to_string(row.flag);
      if (!row.error.empty()) out << ": " << csv_safe(row.error);
      out << '\n';
    }
  }
  if (!report.validation.empty()) {
    if (multi) out << "# validation\n";
    out << "window,import_queue,export_queue,total_queue,"
           "utilization_calculated_pct,utilization_observed_pct,"
           "relative_error_pct,status\n";
    for (const auto& row : report.validation) {
      out << row.window << ',';
      if (row.row) {
        out << fmt_full(row.row->import_queue) << ','
            << fmt_full(row.row->export_queue) << ','
            << fmt_full(row.row->total_queue) << ','
            << fmt_full(row.row->calculated_utilization_pct) << ',';
        if (row.row->observed_utilization_pct)
          out << fmt_full(*row.row->observed_utilization_pct);
        out << ',';
        if (row.row->relative_error_pct)
          out << fmt_full(*row.row->relative_error_pct);
        out << ',';
      } else {
        out << ",,,,,,";
      }
      out << to_string(row.flag);
      if (!row.error.empty()) out << ": " << csv_safe(row.error);
      out << '\n';
    }
  }
}

}  // namespace

std::string render_report(const Report& report, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::Table: {
      bool first = true;
      auto gap = [&] {
        if (!first) out << "\n";
        first = false;
      };
      if (!report.anchorage.empty()) { gap(); render_anchorage_table(report, out); }
      if (!report.imports.empty()) { gap(); render_import_table(report, out); }
      if (!report.exports.empty()) { gap(); render_export_table(report, out); }
      if (!report.validation.empty()) { gap(); render_validation_table(report, out); }
      if (first) out << "(empty report)\n";
      break;
    }
    case OutputFormat::Csv:
      render_csv(report, out);
      break;
    case OutputFormat::Json:
      out << report_to_json(report).dump(2) << "\n";
      break;
  }
  return out.str();
}

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json j;
  j["anchorage"] = nlohmann::json::array();
  for (const auto& row : report.anchorage) {
    nlohmann::json r;
    r["window"] = row.window;
    r["classes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < row.classes.size(); ++i) {
      const auto& c = row.classes[i];
      nlohmann::json cj;
      cj["class"] = c.cargo_class.name;
      cj["unit"] = c.cargo_class.unit_label;
      cj["arrival_rate"] = c.arrival_rate.per_hour();
      cj["queue_observed"] = c.mean_queue_length;
      if (row.estimate)
        cj["queue_predicted"] = row.estimate->predicted_queue_lengths[i];
      r["classes"].push_back(std::move(cj));
    }
    if (row.observed_wait_hours) r["wait_observed_hours"] = *row.observed_wait_hours;
    if (row.estimate) {
      r["service_rate"] = row.estimate->service_rate.per_hour();
      r["traffic_intensity"] = row.estimate->traffic_intensity;
      r["wait_calculated_hours"] = row.estimate->predicted_wait_hours;
      r["residual"] = row.estimate->residual;
      if (row.estimate->observed_wait_relative_error_pct)
        r["relative_error_pct"] = *row.estimate->observed_wait_relative_error_pct;
    }
    r["error"] = row.error;
    j["anchorage"].push_back(std::move(r));
  }

  j["import"] = nlohmann::json::array();
  for (const auto& row : report.imports) {
    nlohmann::json r;
    r["window"] = row.window;
    r["arrival_rate"] = row.arrival_rate;
    r["batch_mean"] = row.batch_mean;
    r["batch_second_moment"] = row.batch_second_moment;
    r["dwell_hours"] = row.dwell_hours;
    if (row.estimate) {
      r["service_rate"] = row.estimate->service_rate.per_hour();
      r["traffic_intensity"] = row.estimate->traffic_intensity;
      r["queue_predicted"] = row.estimate->predicted_queue_length;
    }
    r["flag"] = to_string(row.flag);
    r["error"] = row.error;
    j["import"].push_back(std::move(r));
  }

  j["export"] = nlohmann::json::array();
  for (const auto& row : report.exports) {
    nlohmann::json r;
    r["window"] = row.window;
    r["yard_arrival_rate"] = row.yard_arrival_rate;
    r["dwell_hours"] = row.dwell_hours;
    if (row.estimate) {
      r["service_rate"] = row.estimate->service_rate.per_hour();
      r["traffic_intensity"] = row.estimate->traffic_intensity;
      r["queue_predicted"] = row.estimate->predicted_queue_length;
    }
    r["flag"] = to_string(row.flag);
    r["error"] = row.error;
    j["export"].push_back(std::move(r));
  }

  j["validation"] = nlohmann::json::array();
  for (const auto& row : report.validation) {
    nlohmann::json r;
    r["window"] = row.window;
    if (row.row) {
      r["import_queue"] = row.row->import_queue;
      r["export_queue"] = row.row->export_queue;
      r["total_queue"] = row.row->total_queue;
      r["utilization_calculated_pct"] = row.row->calculated_utilization_pct;
      if (row.row->observed_utilization_pct)
        r["utilization_observed_pct"] = *row.row->observed_utilization_pct;
      if (row.row->relative_error_pct)
        r["relative_error_pct"] = *row.row->relative_error_pct;
    }
    r["flag"] = to_string(row.flag);
    r["error"] = row.error;
    j["validation"].push_back(std::move(r));
  }
  return j;
}

namespace {

StabilityFlag flag_from_string(const std::string& s) {
  if (s == "stable") return StabilityFlag::Stable;
  if (s == "unstable-import") return StabilityFlag::UnstableImport;
  if (s == "unstable-export") return StabilityFlag::UnstableExport;
  if (s == "near-critical") return StabilityFlag::NearCritical;
  throw InputError("unknown stability flag '" + s + "'");
}

std::optional<double> opt_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

Report report_from_json(const nlohmann::json& j) {
  Report report;
  for (const auto& r : j.value("anchorage", nlohmann::json::array())) {
    AnchorageReportRow row;
    row.window = r.at("window").get<std::string>();
    row.observed_wait_hours = opt_double(r, "wait_observed_hours");
    row.error = r.value("error", "");
    bool has_estimate = r.contains("service_rate");
    AnchorageCapacityEstimate est;
    for (const auto& cj : r.at("classes")) {
      AnchorageClassObservation c;
      c.cargo_class = CargoClass(cj.at("class").get<std::string>(),
                                 cj.value("unit", ""));
      c.arrival_rate = Rate(cj.at("arrival_rate").get<double>());
      c.mean_queue_length = cj.at("queue_observed").get<double>();
      row.classes.push_back(std::move(c));
      if (has_estimate)
        est.predicted_queue_lengths.push_back(
            cj.at("queue_predicted").get<double>());
    }
    if (has_estimate) {
      est.service_rate = Rate(r.at("service_rate").get<double>());
      est.traffic_intensity = r.at("traffic_intensity").get<double>();
      est.predicted_wait_hours = r.at("wait_calculated_hours").get<double>();
      est.residual = r.at("residual").get<double>();
      est.observed_wait_relative_error_pct = opt_double(r, "relative_error_pct");
      row.estimate = std::move(est);
    }
    report.anchorage.push_back(std::move(row));
  }

  for (const auto& r : j.value("import", nlohmann::json::array())) {
    ImportReportRow row;
    row.window = r.at("window").get<std::string>();
    row.arrival_rate = r.at("arrival_rate").get<double>();
    row.batch_mean = r.at("batch_mean").get<double>();
    row.batch_second_moment = r.at("batch_second_moment").get<double>();
    row.dwell_hours = r.at("dwell_hours").get<double>();
    if (r.contains("service_rate")) {
      ImportCapacityEstimate est;
      est.service_rate = Rate(r.at("service_rate").get<double>());
      est.traffic_intensity = r.at("traffic_intensity").get<double>();
      est.predicted_queue_length = r.at("queue_predicted").get<double>();
      row.estimate = est;
    }
    row.flag = flag_from_string(r.at("flag").get<std::string>());
    row.error = r.value("error", "");
    report.imports.push_back(std::move(row));
  }

  for (const auto& r : j.value("export", nlohmann::json::array())) {
    ExportReportRow row;
    row.window = r.at("window").get<std::string>();
    row.yard_arrival_rate = r.at("yard_arrival_rate").get<double>();
    row.dwell_hours = r.at("dwell_hours").get<double>();
    if (r.contains("service_rate")) {
      ExportCapacityEstimate est;
      est.service_rate = Rate(r.at("service_rate").get<double>());
      est.traffic_intensity = r.at("traffic_intensity").get<double>();
      est.predicted_queue_length = r.at("queue_predicted").get<double>();
      row.estimate = est;
    }
    row.flag = flag_from_string(r.at("flag").get<std::string>());
    row.error = r.value("error", "");
    report.exports.push_back(std::move(row));
  }

  for (const auto& r : j.value("validation", nlohmann::json::array())) {
    ValidationReportRow row;
    row.window = r.at("window").get<std::string>();
    row.flag = flag_from_string(r.at("flag").get<std::string>());
    row.error = r.value("error", "");
    if (r.contains("import_queue")) {
      ValidationRow v;
      v.window_label = row.window;
      v.import_queue = r.at("import_queue").get<double>();
      v.export_queue = r.at("export_queue").get<double>();
      v.total_queue = r.at("total_queue").get<double>();
      v.calculated_utilization_pct =
          r.at("utilization_calculated_pct").get<double>();
      v.observed_utilization_pct = opt_double(r, "utilization_observed_pct");
      v.relative_error_pct = opt_double(r, "relative_error_pct");
      v.flag = row.flag;
      row.row = std::move(v);
    }
    report.validation.push_back(std::move(row));
  }
  return report;
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig config;
  if (!j.contains("topology")) throw InputError("sim config: missing topology");
  config.topology = parse_topology(j.at("topology").get<std::string>());
  if (!j.contains("arrival_rates"))
    throw InputError("sim config: missing arrival_rates");
  config.arrival_rates = j.at("arrival_rates").get<std::vector<double>>();
  if (!j.contains("service_rates"))
    throw InputError("sim config: missing service_rates");
  config.service_rates = j.at("service_rates").get<std::vector<double>>();
  if (j.contains("class_names"))
    config.class_names = j.at("class_names").get<std::vector<std::string>>();
  if (j.contains("batch")) {
    const auto& b = j.at("batch");
    const std::string kind = b.value("kind", "deterministic");
    if (kind == "deterministic")
      config.batch = BatchDistribution::deterministic(b.value("size", 1));
    else if (kind == "geometric")
      config.batch = BatchDistribution::geometric(b.value("mean", 1.0));
    else if (kind == "empirical") {
      std::vector<std::pair<int, double>> table;
      for (const auto& entry : b.at("table"))
        table.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
      config.batch = BatchDistribution::empirical(std::move(table));
    } else {
      throw InputError("sim config: unknown batch kind '" + kind + "'");
    }
  }
  if (j.contains("gate_count")) config.gate_count = j.at("gate_count").get<int>();
  if (!j.contains("horizon_hours"))
    throw InputError("sim config: missing horizon_hours");
  config.horizon_hours = j.at("horizon_hours").get<double>();
  config.warmup_hours = j.value("warmup_hours", 0.0);
  config.seed = j.value("seed", 0ULL);
  config.ci_batches = j.value("ci_batches", 20);
  return config;
}

SimReport build_sim_report(const SimConfig& config) {
  config.validate();
  SimReport report;
  report.topology = config.topology;
  report.seed = config.seed;
  report.result = run_simulation(config);

  switch (config.topology) {
    case Topology::MulticlassSingleServer: {
      std::optional<double> wait;
      try {
        wait = anchorage_mean_wait(config.arrival_rates, config.service_rates[0]);
      } catch (const ModelError&) {
        // Unstable configuration: no closed form to compare against.
      }
      for (std::size_t c = 0; c < config.arrival_rates.size(); ++c) {
        SimAnalyticValue v;
        v.label = report.result.queues[c].label;
        if (wait) {
          v.wait_hours = *wait;
          v.queue_length = config.arrival_rates[c] * *wait;
        }
        report.analytic.push_back(std::move(v));
      }
      break;
    }
    case Topology::BatchSingleServer: {
      SimAnalyticValue v;
      v.label = "cargo";
      try {
        BatchMoments m = config.batch.moments();
        v.wait_hours =
            import_dwell(config.arrival_rates[0], m, config.service_rates[0]);
        v.queue_length =
            import_queue_length(config.arrival_rates[0], m, config.service_rates[0]);
      } catch (const ModelError&) {
      }
      report.analytic.push_back(std::move(v));
      break;
    }
    case Topology::TandemExport: {
      // Only the yard stage has an estimated closed form; gate and holding
      // statistics are reported from the simulation alone.
      for (int s = 0; s < 3; ++s) {
        SimAnalyticValue v;
        v.label = report.result.queues[s].label;
        if (s == 2) {
          double lambda = config.arrival_rates[0];
          double mu = config.service_rates[2];
          if (mu > lambda) {
            v.queue_length = export_queue_length(lambda, mu);
            v.wait_hours = *v.queue_length / lambda;
          }
        }
        report.analytic.push_back(std::move(v));
      }
      break;
    }
  }
  return report;
}

namespace {

nlohmann::json sim_report_to_json(const SimReport& report) {
  nlohmann::json j;
  j["topology"] = to_string(report.topology);
  j["seed"] = report.seed;
  j["stability_warning"] = report.result.stability_warning;
  j["empty_samples"] = report.result.empty_samples;
  j["queues"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.result.queues.size(); ++i) {
    const auto& q = report.result.queues[i];
    nlohmann::json qj;
    qj["label"] = q.label;
    qj["mean_wait_hours"] = q.mean_wait_hours;
    qj["wait_half_width"] = q.wait_half_width;
    qj["time_avg_queue"] = q.time_avg_queue;
    qj["queue_half_width"] = q.queue_half_width;
    qj["wait_samples"] = q.wait_samples;
    qj["measured_arrival_rate"] = q.measured_arrival_rate;
    if (i < report.analytic.size()) {
      if (report.analytic[i].wait_hours)
        qj["analytic_wait_hours"] = *report.analytic[i].wait_hours;
      if (report.analytic[i].queue_length)
        qj["analytic_queue_length"] = *report.analytic[i].queue_length;
    }
    j["queues"].push_back(std::move(qj));
  }
  j["stages"] = nlohmann::json::array();
  for (const auto& s : report.result.stages) {
    nlohmann::json sj;
    sj["label"] = s.label;
    sj["utilization"] = s.utilization;
    sj["departure_rate"] = s.departure_rate;
    sj["departure_rate_half_width"] = s.departure_rate_half_width;
    j["stages"].push_back(std::move(sj));
  }
  return j;
}

}  // namespace

std::string render_sim_report(const SimReport& report, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::Json:
      out << sim_report_to_json(report).dump(2) << "\n";
      break;
    case OutputFormat::Csv: {
      out << "# queues\n";
      out << "label,mean_wait_hours,wait_half_width,time_avg_queue,"
             "queue_half_width,wait_samples,measured_arrival_rate,"
             "analytic_wait_hours,analytic_queue_length\n";
      for (std::size_t i = 0; i < report.result.queues.size(); ++i) {
        const auto& q = report.result.queues[i];
        out << q.label << ',' << fmt_full(q.mean_wait_hours) << ','
            << fmt_full(q.wait_half_width) << ',' << fmt_full(q.time_avg_queue)
            << ',' << fmt_full(q.queue_half_width) << ',' << q.wait_samples
            << ',' << fmt_full(q.measured_arrival_rate) << ',';
        if (i < report.analytic.size() && report.analytic[i].wait_hours)
          out << fmt_full(*report.analytic[i].wait_hours);
        out << ',';
        if (i < report.analytic.size() && report.analytic[i].queue_length)
          out << fmt_full(*report.analytic[i].queue_length);
        out << '\n';
      }
      out << "# stages\n";
      out << "label,utilization,departure_rate,departure_rate_half_width\n";
      for (const auto& s : report.result.stages)
        out << s.label << ',' << fmt_full(s.utilization) << ','
            << fmt_full(s.departure_rate) << ','
            << fmt_full(s.departure_rate_half_width) << '\n';
      break;
    }
    case OutputFormat::Table: {
      out << "== Simulation: " << to_string(report.topology) << " (seed "
          << report.seed << ") ==\n";
      out << std::left << std::setw(12) << "queue" << std::right
          << std::setw(12) << "wait_h" << std::setw(10) << "+-95%"
          << std::setw(12) << "W_model" << std::setw(12) << "queue_len"
          << std::setw(10) << "+-95%" << std::setw(12) << "L_model"
          << std::setw(10) << "samples" << "\n";
      for (std::size_t i = 0; i < report.result.queues.size(); ++i) {
        const auto& q = report.result.queues[i];
        const SimAnalyticValue* a =
            i < report.analytic.size() ? &report.analytic[i] : nullptr;
        out << std::left << std::setw(12) << q.label << std::right
            << std::setw(12) << fmt_fixed(q.mean_wait_hours, 4) << std::setw(10)
            << fmt_fixed(q.wait_half_width, 4) << std::setw(12)
            << (a && a->wait_hours ? fmt_fixed(*a->wait_hours, 4)
                                   : std::string("-"))
            << std::setw(12) << fmt_fixed(q.time_avg_queue, 4) << std::setw(10)
            << fmt_fixed(q.queue_half_width, 4) << std::setw(12)
            << (a && a->queue_length ? fmt_fixed(*a->queue_length, 4)
                                     : std::string("-"))
            << std::setw(10) << q.wait_samples << "\n";
      }
      out << "\n" << std::left << std::setw(12) << "stage" << std::right
          << std::setw(14) << "utilization" << std::setw(16) << "departures_h"
          << std::setw(10) << "+-95%" << "\n";
      for (const auto& s : report.result.stages)
        out << std::left << std::setw(12) << s.label << std::right
            << std::setw(14) << fmt_fixed(s.utilization, 4) << std::setw(16)
            << fmt_fixed(s.departure_rate, 4) << std::setw(10)
            << fmt_fixed(s.departure_rate_half_width, 4) << "\n";
      if (report.result.stability_warning)
        out << "\nwarning: offered load at or beyond capacity; results "
               "describe an unstable system\n";
      if (report.result.empty_samples)
        out << "\nwarning: some queue saw no completed waits (empty sample)\n";
      break;
    }
  }
  return out.str();
}

}  // namespace portcap
