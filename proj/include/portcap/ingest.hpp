#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "portcap/anchorage.hpp"
#include "portcap/domain.hpp"
#include "portcap/export_model.hpp"
#include "portcap/import_model.hpp"

namespace portcap {

enum class VesselEventType {
  AnchorageArrival,
  ChannelEntry,
  TerminalArrival,
  TerminalDeparture
};

VesselEventType parse_vessel_event_type(const std::string& text);
const char* to_string(VesselEventType type);

/// One pre-extracted vessel life-cycle event (AIS-derived).
struct VesselEvent {
  std::string vessel_id;
  std::string cargo_class;
  VesselEventType event = VesselEventType::AnchorageArrival;
  Timestamp timestamp{};
};

enum class GateDirection { Import, Export };

/// One truck gate transaction.
struct GateTransaction {
  std::string truck_id;
  GateDirection direction = GateDirection::Import;
  Timestamp timestamp{};
  int container_count = 1;
};

/// Builds an anchorage observation from vessel events.
///  - arrival rate per class: arrivals inside [start, end) / duration;
///  - observed mean wait: mean of (channel_entry - anchorage_arrival) over
///    waits that END inside the window, pooled across classes;
///  - mean queue length per class: time average over the window of vessels
///    that have arrived but not yet entered the channel.
/// A channel_entry without a prior arrival skips the vessel with a warning.
/// Throws InputError when the window contains no arrivals at all.
AnchorageObservation aggregate_anchorage(
    std::vector<VesselEvent> events, const Window& window,
    std::vector<std::string>* warnings = nullptr);

/// Export cargo arrival rate: container counts of export transactions inside
/// [start, end) divided by the window length.
Rate aggregate_gate(const std::vector<GateTransaction>& transactions,
                    const Window& window);

/// Everything known about one window after loading an observation file.
struct ObservationBundle {
  Window window;
  std::optional<AnchorageObservation> anchorage;
  std::optional<ImportObservation> import_obs;
  std::optional<ExportObservation> export_obs;
  std::optional<double> observed_utilization_pct;
};

/// Reads an events.csv file (header: vessel_id,cargo_class,event,timestamp).
std::vector<VesselEvent> load_vessel_events(const std::string& path);
std::vector<VesselEvent> read_vessel_events(std::istream& in,
                                            const std::string& name);

/// Reads a gates.csv file (header: truck_id,direction,timestamp,container_count).
std::vector<GateTransaction> load_gate_transactions(const std::string& path);
std::vector<GateTransaction> read_gate_transactions(std::istream& in,
                                                    const std::string& name);

/// Reads an observations.csv file (see the documented schema) into one
/// bundle per window label, sorted by label. Rows of kind anchorage, import,
/// export and yard populate the matching slot; a duplicate slot is an error.
std::vector<ObservationBundle> load_observation_file(const std::string& path);
std::vector<ObservationBundle> read_observation_file(std::istream& in,
                                                     const std::string& name);

/// The exact observations.csv header.
extern const char* const kObservationHeader;
extern const char* const kVesselEventHeader;
extern const char* const kGateHeader;

}  // namespace portcap
