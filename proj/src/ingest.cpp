#include "portcap/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace portcap {

const char* const kObservationHeader =
    "window,kind,class,arrival_rate,queue_length,dwell_value,dwell_unit,"
    "batch_mean,batch_variance,observed_wait,observed_utilization";
const char* const kVesselEventHeader = "vessel_id,cargo_class,event,timestamp";
const char* const kGateHeader = "truck_id,direction,timestamp,container_count";

VesselEventType parse_vessel_event_type(const std::string& text) {
  if (text == "anchorage_arrival") return VesselEventType::AnchorageArrival;
  if (text == "channel_entry") return VesselEventType::ChannelEntry;
  if (text == "terminal_arrival") return VesselEventType::TerminalArrival;
  if (text == "terminal_departure") return VesselEventType::TerminalDeparture;
  throw InputError("unknown vessel event '" + text + "'");
}

const char* to_string(VesselEventType type) {
  switch (type) {
    case VesselEventType::AnchorageArrival: return "anchorage_arrival";
    case VesselEventType::ChannelEntry: return "channel_entry";
    case VesselEventType::TerminalArrival: return "terminal_arrival";
    case VesselEventType::TerminalDeparture: return "terminal_departure";
  }
  return "unknown";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current.push_back(ch);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string location(const std::string& name, std::size_t row) {
  return name + " row " + std::to_string(row);
}

double parse_double_field(const std::string& text, const std::string& name,
                          std::size_t row, const char* field) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InputError(location(name, row) + ": field '" + field +
                     "': not a number: '" + text + "'");
  }
  if (pos != text.size())
    throw InputError(location(name, row) + ": field '" + field +
                     "': not a number: '" + text + "'");
  return value;
}

void expect_header(const std::string& got, const char* want,
                   const std::string& name) {
  auto fields = split_csv_line(got);
  auto expected = split_csv_line(want);
  if (fields != expected)
    throw InputError(name + ": bad header (expected '" + want + "')");
}

// Waiting spell of one vessel: arrival and (possibly still-open) entry.
struct Spell {
  std::string cargo_class;
  Timestamp arrived;
  std::optional<Timestamp> entered;
};

}  // namespace

std::vector<VesselEvent> read_vessel_events(std::istream& in,
                                            const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(name + ": empty file");
  expect_header(line, kVesselEventHeader, name);

  std::vector<VesselEvent> events;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 4)
      throw InputError(location(name, row) + ": expected 4 fields, got " +
                       std::to_string(f.size()));
    VesselEvent e;
    e.vessel_id = f[0];
    e.cargo_class = f[1];
    if (e.vessel_id.empty())
      throw InputError(location(name, row) + ": field 'vessel_id': empty");
    if (e.cargo_class.empty())
      throw InputError(location(name, row) + ": field 'cargo_class': empty");
    try {
      e.event = parse_vessel_event_type(f[2]);
      e.timestamp = parse_iso8601_utc(f[3]);
    } catch (const InputError& err) {
      throw InputError(location(name, row) + ": " + err.what());
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<VesselEvent> load_vessel_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_vessel_events(in, path);
}

std::vector<GateTransaction> read_gate_transactions(std::istream& in,
                                                    const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(name + ": empty file");
  expect_header(line, kGateHeader, name);

  std::vector<GateTransaction> txns;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 4)
      throw InputError(location(name, row) + ": expected 4 fields, got " +
                       std::to_string(f.size()));
    GateTransaction t;
    t.truck_id = f[0];
    if (f[1] == "import")
      t.direction = GateDirection::Import;
    else if (f[1] == "export")
      t.direction = GateDirection::Export;
    else
      throw InputError(location(name, row) +
                       ": field 'direction': expected import or export, got '" +
                       f[1] + "'");
    try {
      t.timestamp = parse_iso8601_utc(f[2]);
    } catch (const InputError& err) {
      throw InputError(location(name, row) + ": " + err.what());
    }
    if (f[3].empty()) {
      t.container_count = 1;
    } else {
      double v = parse_double_field(f[3], name, row, "container_count");
      t.container_count = static_cast<int>(v);
      if (t.container_count < 1 || v != t.container_count)
        throw InputError(location(name, row) +
                         ": field 'container_count': must be a positive integer");
    }
    txns.push_back(std::move(t));
  }
  return txns;
}

std::vector<GateTransaction> load_gate_transactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_gate_transactions(in, path);
}

AnchorageObservation aggregate_anchorage(std::vector<VesselEvent> events,
                                         const Window& window,
                                         std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::stable_sort(events.begin(), events.end(),
                   [](const VesselEvent& a, const VesselEvent& b) {
                     return a.timestamp < b.timestamp;
                   });

  // Pair each vessel's anchorage_arrival with its next channel_entry.
  std::map<std::string, std::vector<Spell>> spells_by_vessel;
  std::map<std::string, bool> skipped;
  for (const auto& e : events) {
    if (e.event != VesselEventType::AnchorageArrival &&
        e.event != VesselEventType::ChannelEntry)
      continue;
    if (skipped.count(e.vessel_id)) continue;
    auto& spells = spells_by_vessel[e.vessel_id];
    if (e.event == VesselEventType::AnchorageArrival) {
      if (!spells.empty() && !spells.back().entered) {
        warn("vessel '" + e.vessel_id +
             "': repeated anchorage_arrival without channel_entry; vessel skipped");
        skipped[e.vessel_id] = true;
        spells_by_vessel.erase(e.vessel_id);
        continue;
      }
      spells.push_back(Spell{e.cargo_class, e.timestamp, std::nullopt});
    } else {
      if (spells.empty() || spells.back().entered) {
        warn("vessel '" + e.vessel_id +
             "': channel_entry without prior anchorage_arrival; vessel skipped");
        skipped[e.vessel_id] = true;
        spells_by_vessel.erase(e.vessel_id);
        continue;
      }
      spells.back().entered = e.timestamp;
    }
  }

  struct ClassAccumulator {
    long arrivals = 0;
    double waiting_hours = 0.0;  // integral of the waiting count over the window
  };
  std::map<std::string, ClassAccumulator> per_class;
  double wait_sum_hours = 0.0;
  long wait_count = 0;

  const double start_s =
      static_cast<double>(window.start().time_since_epoch().count());
  const double end_s =
      static_cast<double>(window.end().time_since_epoch().count());

  for (const auto& [vessel, spells] : spells_by_vessel) {
    for (const auto& spell : spells) {
      if (spell.entered && *spell.entered < spell.arrived) {
        warn("vessel '" + vessel + "': channel_entry precedes arrival; skipped");
        continue;
      }
      auto& acc = per_class[spell.cargo_class];
      if (window.contains(spell.arrived)) ++acc.arrivals;
      if (spell.entered && window.contains(*spell.entered)) {
        wait_sum_hours +=
            std::chrono::duration<double, std::ratio<3600>>(*spell.entered -
                                                            spell.arrived)
                .count();
        ++wait_count;
      }
      // Overlap of the waiting interval with the window, in seconds.
      double a = static_cast<double>(spell.arrived.time_since_epoch().count());
      double b = spell.entered
                     ? static_cast<double>(
                           spell.entered->time_since_epoch().count())
                     : end_s;
      double lo = std::max(a, start_s);
      double hi = std::min(b, end_s);
      if (hi > lo) acc.waiting_hours += (hi - lo) / 3600.0;
    }
  }

  long total_arrivals = 0;
  for (const auto& [cls, acc] : per_class) total_arrivals += acc.arrivals;
  if (total_arrivals == 0)
    throw InputError("empty window: no anchorage arrivals in '" +
                     window.label() + "'");

  AnchorageObservation obs{window, {}, std::nullopt};
  for (const auto& [cls, acc] : per_class) {
    AnchorageClassObservation c;
    c.cargo_class = CargoClass(cls);
    c.arrival_rate = Rate(acc.arrivals / window.duration_hours());
    c.mean_queue_length = acc.waiting_hours / window.duration_hours();
    obs.classes.push_back(std::move(c));
  }
  if (wait_count > 0) obs.observed_mean_wait_hours = wait_sum_hours / wait_count;
  return obs;
}

Rate aggregate_gate(const std::vector<GateTransaction>& transactions,
                    const Window& window) {
  long containers = 0;
  for (const auto& t : transactions)
    if (t.direction == GateDirection::Export && window.contains(t.timestamp))
      containers += t.container_count;
  return Rate(containers / window.duration_hours());
}

namespace {

Window window_from_label(const std::string& label) {
  try {
    return Window::from_quarter(label);
  } catch (const InputError&) {
    // Not a quarter label; pre-aggregated inputs never use the span anyway.
    return Window::from_hours(label, 1.0);
  }
}

struct PendingBundle {
  std::vector<AnchorageClassObservation> anchorage_classes;
  std::optional<double> observed_wait_hours;
  std::optional<ImportObservation> import_obs;
  std::optional<ExportObservation> export_obs;
  std::optional<double> observed_utilization_pct;
};

}  // namespace

std::vector<ObservationBundle> read_observation_file(std::istream& in,
                                                     const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(name + ": empty file");
  expect_header(line, kObservationHeader, name);

  std::map<std::string, PendingBundle> pending;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 11)
      throw InputError(location(name, row) + ": expected 11 fields, got " +
                       std::to_string(f.size()));
    const std::string& label = f[0];
    const std::string& kind = f[1];
    if (label.empty())
      throw InputError(location(name, row) + ": field 'window': empty");

    auto require = [&](int idx, const char* field) -> const std::string& {
      if (f[idx].empty())
        throw InputError(location(name, row) + ": field '" +
                         std::string(field) + "': required for kind '" + kind +
                         "'");
      return f[idx];
    };
    auto number = [&](int idx, const char* field) {
      return parse_double_field(require(idx, field), name, row, field);
    };
    auto nonneg = [&](int idx, const char* field) {
      double v = number(idx, field);
      if (v < 0.0)
        throw InputError(location(name, row) + ": field '" +
                         std::string(field) + "': negative");
      return v;
    };

    auto& bundle = pending[label];
    if (kind == "anchorage") {
      const std::string& cls = require(2, "class");
      for (const auto& existing : bundle.anchorage_classes)
        if (existing.cargo_class.name == cls)
          throw InputError(location(name, row) + ": duplicate anchorage row for '" +
                           label + "' class '" + cls + "'");
      AnchorageClassObservation c;
      c.cargo_class = CargoClass(cls);
      double rate = number(3, "arrival_rate");
      double queue = number(4, "queue_length");
      if (rate < 0.0 || queue < 0.0)
        throw InputError(location(name, row) + ": negative value");
      c.arrival_rate = Rate(rate);
      c.mean_queue_length = queue;
      bundle.anchorage_classes.push_back(std::move(c));
      if (!f[9].empty()) {
        double wait = parse_double_field(f[9], name, row, "observed_wait");
        if (bundle.observed_wait_hours &&
            *bundle.observed_wait_hours != wait)
          throw InputError(location(name, row) +
                           ": field 'observed_wait': conflicting values for '" +
                           label + "'");
        bundle.observed_wait_hours = wait;
      }
    } else if (kind == "import") {
      if (bundle.import_obs)
        throw InputError(location(name, row) + ": duplicate import row for '" +
                         label + "'");
      ImportObservation obs{window_from_label(label), Rate(), BatchMoments(),
                            Duration()};
      obs.vessel_arrival_rate = Rate(nonneg(3, "arrival_rate"));
      double dwell = nonneg(5, "dwell_value");
      const std::string& unit = require(6, "dwell_unit");
      if (unit == "days")
        obs.dwell_time = Duration::days(dwell);
      else if (unit == "hours")
        obs.dwell_time = Duration::hours(dwell);
      else
        throw InputError(location(name, row) +
                         ": field 'dwell_unit': expected days or hours, got '" +
                         unit + "'");
      double mean = number(7, "batch_mean");
      double variance = number(8, "batch_variance");
      try {
        obs.batch = batch_moments_from_mean_variance(mean, variance);
      } catch (const ModelError& err) {
        throw InputError(location(name, row) + ": " + err.what());
      }
      bundle.import_obs = std::move(obs);
    } else if (kind == "export") {
      if (bundle.export_obs)
        throw InputError(location(name, row) + ": duplicate export row for '" +
                         label + "'");
      ExportObservation obs{window_from_label(label), Rate(), std::nullopt,
                            Duration(), std::nullopt};
      obs.gate_arrival_rate = Rate(nonneg(3, "arrival_rate"));
      double dwell = nonneg(5, "dwell_value");
      const std::string& unit = require(6, "dwell_unit");
      if (unit == "days")
        obs.dwell_time = Duration::days(dwell);
      else if (unit == "hours")
        obs.dwell_time = Duration::hours(dwell);
      else
        throw InputError(location(name, row) +
                         ": field 'dwell_unit': expected days or hours, got '" +
                         unit + "'");
      bundle.export_obs = std::move(obs);
    } else if (kind == "yard") {
      if (bundle.observed_utilization_pct)
        throw InputError(location(name, row) + ": duplicate yard row for '" +
                         label + "'");
      bundle.observed_utilization_pct = nonneg(10, "observed_utilization");
    } else {
      throw InputError(location(name, row) +
                       ": field 'kind': expected anchorage, import, export or "
                       "yard, got '" +
                       kind + "'");
    }
  }

  std::vector<ObservationBundle> bundles;
  bundles.reserve(pending.size());
  for (auto& [label, p] : pending) {
    ObservationBundle b{window_from_label(label), std::nullopt, std::nullopt,
                        std::nullopt, p.observed_utilization_pct};
    if (!p.anchorage_classes.empty()) {
      b.anchorage = AnchorageObservation{b.window, std::move(p.anchorage_classes),
                                         p.observed_wait_hours};
    }
    b.import_obs = std::move(p.import_obs);
    b.export_obs = std::move(p.export_obs);
    bundles.push_back(std::move(b));
  }
  // std::map iteration already sorted bundles by window label.
  return bundles;
}

std::vector<ObservationBundle> load_observation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_observation_file(in, path);
}

}  // namespace portcap
