#include "portcap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <random>

namespace portcap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One pseudo-random stream per stochastic process, derived from the master
// seed by a fixed tag so streams stay independent of each other.
class Stream {
 public:
  Stream() : engine_(0) {}
  Stream(std::uint64_t seed, std::uint64_t tag)
      : engine_(splitmix64(seed ^ splitmix64(tag))) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

constexpr std::uint64_t kArrivalTag = 0x41525200;  // + class index
constexpr std::uint64_t kServiceTag = 0x53525600;  // + stage index
constexpr std::uint64_t kBatchTag = 0x42415443;

double t_quantile_975(int df) {
  static constexpr double kTable[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return std::numeric_limits<double>::infinity();
  if (df <= 30) return kTable[df - 1];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  return 1.960;
}

struct Event {
  double time;
  std::uint64_t seq;  // tie-break: insertion order
  int kind;           // 0 = external arrival, 1 = service completion
  int stage;
  int cls;

  bool operator>(const Event& other) const {
    if (time != other.time) return time > other.time;
    return seq > other.seq;
  }
};

struct Waiting {
  double arrived;
  int cls;
};

// Time-averaged waiting count plus wait samples, binned for batch-means CIs.
struct QueueTrack {
  std::string label;
  long waiting = 0;
  double area = 0.0;
  std::vector<double> bin_area;
  double wait_sum = 0.0;
  long wait_count = 0;
  std::vector<double> bin_wait_sum;
  std::vector<long> bin_wait_count;
  long arrivals = 0;  // post-warmup arrivals to this line

  explicit QueueTrack(std::string name, int bins)
      : label(std::move(name)),
        bin_area(bins, 0.0),
        bin_wait_sum(bins, 0.0),
        bin_wait_count(bins, 0) {}
};

struct StageTrack {
  std::string label;
  int servers = 1;
  double rate = 1.0;
  long busy = 0;
  double busy_area = 0.0;
  long departures = 0;
  std::vector<long> bin_departures;
  std::deque<Waiting> queue;

  StageTrack(std::string name, int servers, double rate, int bins)
      : label(std::move(name)),
        servers(servers),
        rate(rate),
        bin_departures(bins, 0) {}
};

struct BatchSampler {
  const BatchDistribution& dist;
  Stream stream;
  std::vector<double> cumulative;  // empirical CDF

  BatchSampler(const BatchDistribution& d, std::uint64_t seed)
      : dist(d), stream(seed, kBatchTag) {
    if (dist.kind == BatchDistribution::Kind::Empirical) {
      double acc = 0.0;
      cumulative.reserve(dist.table.size());
      for (const auto& [size, prob] : dist.table) {
        acc += prob;
        cumulative.push_back(acc);
      }
    }
  }

  int sample() {
    switch (dist.kind) {
      case BatchDistribution::Kind::Deterministic:
        return dist.size;
      case BatchDistribution::Kind::Geometric: {
        double p = 1.0 / dist.mean;
        if (p >= 1.0) return 1;
        double u = stream.uniform();
        // Support {1, 2, ...}: number of trials until first success.
        return 1 + static_cast<int>(std::log1p(-u) / std::log1p(-p));
      }
      case BatchDistribution::Kind::Empirical: {
        double u = stream.uniform();
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= dist.table.size()) idx = dist.table.size() - 1;
        return dist.table[idx].first;
      }
    }
    return 1;
  }
};

class Engine {
 public:
  explicit Engine(const SimConfig& config) : cfg_(config) {
    span_ = cfg_.horizon_hours - cfg_.warmup_hours;
    bins_ = cfg_.ci_batches;
    bin_width_ = span_ / bins_;

    int nstages = cfg_.topology == Topology::TandemExport ? 3 : 1;
    static const char* kTandemNames[] = {"gate", "holding", "yard"};
    for (int s = 0; s < nstages; ++s) {
      int servers = 1;
      if (cfg_.topology == Topology::TandemExport && s == 0)
        servers = cfg_.gate_count;
      const char* name =
          cfg_.topology == Topology::TandemExport ? kTandemNames[s] : "server";
      stages_.emplace_back(name, servers, cfg_.service_rates[s], bins_);
      service_streams_.emplace_back(cfg_.seed, kServiceTag + s);
    }

    if (cfg_.topology == Topology::MulticlassSingleServer) {
      for (std::size_t c = 0; c < cfg_.arrival_rates.size(); ++c)
        queues_.emplace_back(class_label(static_cast<int>(c)), bins_);
    } else if (cfg_.topology == Topology::BatchSingleServer) {
      queues_.emplace_back("cargo", bins_);
    } else {
      for (const auto& s : stages_) queues_.emplace_back(s.label, bins_);
    }

    for (std::size_t c = 0; c < cfg_.arrival_rates.size(); ++c)
      arrival_streams_.emplace_back(cfg_.seed, kArrivalTag + c);
    if (cfg_.topology == Topology::BatchSingleServer)
      batch_sampler_.emplace(cfg_.batch, cfg_.seed);
  }

  SimResult run() {
    for (std::size_t c = 0; c < cfg_.arrival_rates.size(); ++c)
      schedule_arrival(static_cast<int>(c), 0.0);

    while (!events_.empty()) {
      Event e = events_.top();
      if (e.time > cfg_.horizon_hours) break;
      events_.pop();
      advance_time(e.time);
      if (e.kind == 0)
        handle_arrival(e);
      else
        handle_completion(e);
    }
    advance_time(cfg_.horizon_hours);
    return collect();
  }

 private:
  std::string class_label(int c) const {
    if (static_cast<std::size_t>(c) < cfg_.class_names.size())
      return cfg_.class_names[c];
    return "class-" + std::to_string(c);
  }

  // Index of the waiting line an entity at (stage, cls) belongs to.
  int queue_index(int stage, int cls) const {
    return cfg_.topology == Topology::MulticlassSingleServer ? cls : stage;
  }

  void schedule_arrival(int cls, double now) {
    double t = now + arrival_streams_[cls].exponential(cfg_.arrival_rates[cls]);
    if (t > cfg_.horizon_hours) return;  // stream is done
    events_.push(Event{t, seq_++, 0, 0, cls});
  }

  void schedule_completion(int stage, int cls, double now) {
    double t = now + service_streams_[stage].exponential(stages_[stage].rate);
    events_.push(Event{t, seq_++, 1, stage, cls});
  }

  // Accumulates time-weighted queue and busy-server areas up to `now`,
  // splitting the span across CI bins.
  void advance_time(double now) {
    double t0 = clock_;
    clock_ = now;
    double from = std::max(t0, cfg_.warmup_hours);
    double to = std::min(now, cfg_.horizon_hours);
    if (to <= from) return;
    double dt = to - from;
    for (auto& q : queues_) {
      if (q.waiting == 0) continue;
      q.area += q.waiting * dt;
      split_bins(from, to, [&](int b, double w) { q.bin_area[b] += q.waiting * w; });
    }
    for (auto& s : stages_) s.busy_area += s.busy * dt;
  }

  template <typename Fn>
  void split_bins(double from, double to, Fn add) {
    int b0 = bin_of(from);
    int b1 = bin_of(to - 1e-12 * std::max(1.0, to));
    if (b0 == b1) {
      add(b0, to - from);
      return;
    }
    for (int b = b0; b <= b1; ++b) {
      double lo = std::max(from, cfg_.warmup_hours + b * bin_width_);
      double hi = std::min(to, cfg_.warmup_hours + (b + 1) * bin_width_);
      if (hi > lo) add(b, hi - lo);
    }
  }

  int bin_of(double t) const {
    int b = static_cast<int>((t - cfg_.warmup_hours) / bin_width_);
    return std::clamp(b, 0, bins_ - 1);
  }

  void enqueue(int stage, int cls, double now) {
    stages_[stage].queue.push_back(Waiting{now, cls});
    auto& q = queues_[queue_index(stage, cls)];
    ++q.waiting;
    if (now >= cfg_.warmup_hours) ++q.arrivals;
    start_service(stage, now);
  }

  void handle_arrival(const Event& e) {
    int count = 1;
    if (cfg_.topology == Topology::BatchSingleServer)
      count = batch_sampler_->sample();
    for (int i = 0; i < count; ++i) enqueue(0, e.cls, e.time);
    schedule_arrival(e.cls, e.time);
  }

  void start_service(int stage, double now) {
    auto& s = stages_[stage];
    while (s.busy < s.servers && !s.queue.empty()) {
      Waiting w = s.queue.front();
      s.queue.pop_front();
      auto& q = queues_[queue_index(stage, w.cls)];
      --q.waiting;
      double wait = now - w.arrived;
      if (now >= cfg_.warmup_hours) {
        q.wait_sum += wait;
        ++q.wait_count;
        int b = bin_of(now);
        q.bin_wait_sum[b] += wait;
        ++q.bin_wait_count[b];
      }
      if (cfg_.record_trace && stage == 0)
        trace_.push_back(TraceRecord{w.cls, w.arrived, now});
      ++s.busy;
      schedule_completion(stage, w.cls, now);
    }
  }

  void handle_completion(const Event& e) {
    auto& s = stages_[e.stage];
    --s.busy;
    if (e.time >= cfg_.warmup_hours) {
      ++s.departures;
      ++s.bin_departures[bin_of(e.time)];
    }
    if (e.stage + 1 < static_cast<int>(stages_.size()))
      enqueue(e.stage + 1, e.cls, e.time);
    start_service(e.stage, e.time);
  }

  // Mean and 95% half-width from batch means.
  static std::pair<double, double> batch_ci(const std::vector<double>& means) {
    std::size_t n = means.size();
    if (n < 2) return {n == 1 ? means[0] : 0.0,
                       std::numeric_limits<double>::infinity()};
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    double hw = t_quantile_975(static_cast<int>(n) - 1) * sd /
                std::sqrt(static_cast<double>(n));
    return {mean, hw};
  }

  SimResult collect() {
    SimResult result;
    for (auto& q : queues_) {
      QueueStats st;
      st.label = q.label;
      st.wait_samples = q.wait_count;
      st.mean_wait_hours = q.wait_count > 0 ? q.wait_sum / q.wait_count : 0.0;
      st.time_avg_queue = q.area / span_;
      st.measured_arrival_rate = q.arrivals / span_;

      std::vector<double> wait_means;
      for (int b = 0; b < bins_; ++b)
        if (q.bin_wait_count[b] > 0)
          wait_means.push_back(q.bin_wait_sum[b] / q.bin_wait_count[b]);
      st.wait_half_width = batch_ci(wait_means).second;

      std::vector<double> queue_means;
      queue_means.reserve(bins_);
      for (int b = 0; b < bins_; ++b)
        queue_means.push_back(q.bin_area[b] / bin_width_);
      st.queue_half_width = batch_ci(queue_means).second;

      if (q.wait_count == 0) result.empty_samples = true;
      result.queues.push_back(std::move(st));
    }
    for (auto& s : stages_) {
      StageStats st;
      st.label = s.label;
      st.utilization = s.busy_area / (span_ * s.servers);
      st.departure_rate = s.departures / span_;
      std::vector<double> rates;
      rates.reserve(bins_);
      for (int b = 0; b < bins_; ++b)
        rates.push_back(s.bin_departures[b] / bin_width_);
      st.departure_rate_half_width = batch_ci(rates).second;
      result.stages.push_back(std::move(st));
    }
    if (cfg_.record_trace) {
      // Entities still waiting at the horizon: arrival known, no start.
      for (const auto& w : stages_[0].queue)
        trace_.push_back(TraceRecord{
            w.cls, w.arrived, std::numeric_limits<double>::quiet_NaN()});
      result.trace = std::move(trace_);
    }
    result.stability_warning = offered_load_warning();
    return result;
  }

  bool offered_load_warning() const {
    double inflow = 0.0;
    for (double r : cfg_.arrival_rates) inflow += r;
    if (cfg_.topology == Topology::BatchSingleServer)
      inflow *= cfg_.batch.moments().mean;
    for (const auto& s : stages_) {
      if (inflow >= s.servers * s.rate * (1.0 - kStabilityEpsilon)) return true;
    }
    return false;
  }

  const SimConfig& cfg_;
  double span_;
  int bins_;
  double bin_width_;
  double clock_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
  std::vector<StageTrack> stages_;
  std::vector<QueueTrack> queues_;
  std::vector<Stream> arrival_streams_;
  std::vector<Stream> service_streams_;
  std::optional<BatchSampler> batch_sampler_;
  std::vector<TraceRecord> trace_;
};

}  // namespace

BatchDistribution BatchDistribution::deterministic(int size) {
  BatchDistribution d;
  d.kind = Kind::Deterministic;
  d.size = size;
  d.validate();
  return d;
}

BatchDistribution BatchDistribution::geometric(double mean) {
  BatchDistribution d;
  d.kind = Kind::Geometric;
  d.mean = mean;
  d.validate();
  return d;
}

BatchDistribution BatchDistribution::empirical(
    std::vector<std::pair<int, double>> table) {
  BatchDistribution d;
  d.kind = Kind::Empirical;
  d.table = std::move(table);
  d.validate();
  return d;
}

BatchMoments BatchDistribution::moments() const {
  switch (kind) {
    case Kind::Deterministic:
      return BatchMoments(size, static_cast<double>(size) * size);
    case Kind::Geometric: {
      // Support {1, 2, ...}: E[X] = 1/p, E[X^2] = (2 - p)/p^2.
      double p = 1.0 / mean;
      return BatchMoments(mean, (2.0 - p) / (p * p));
    }
    case Kind::Empirical: {
      double m1 = 0.0, m2 = 0.0;
      for (const auto& [sz, prob] : table) {
        m1 += sz * prob;
        m2 += static_cast<double>(sz) * sz * prob;
      }
      return BatchMoments(m1, m2);
    }
  }
  return BatchMoments(1.0, 1.0);
}

void BatchDistribution::validate() const {
  switch (kind) {
    case Kind::Deterministic:
      if (size < 1) throw InputError("deterministic batch size must be >= 1");
      break;
    case Kind::Geometric:
      if (!std::isfinite(mean) || mean < 1.0)
        throw InputError("geometric batch mean must be >= 1");
      break;
    case Kind::Empirical: {
      if (table.empty()) throw InputError("empirical batch table is empty");
      double total = 0.0;
      for (const auto& [sz, prob] : table) {
        if (sz < 1) throw InputError("empirical batch sizes must be >= 1");
        if (!(prob >= 0.0))
          throw InputError("empirical batch probabilities must be >= 0");
        total += prob;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw InputError("empirical batch probabilities must sum to 1");
      break;
    }
  }
}

void SimConfig::validate() const {
  if (!(horizon_hours > 0.0) || warmup_hours < 0.0)
    throw InputError("simulation horizon must be positive");
  if (warmup_hours >= horizon_hours)
    throw InputError("simulation horizon must exceed warmup");
  if (ci_batches < 2) throw InputError("ci_batches must be at least 2");
  if (arrival_rates.empty()) throw InputError("no arrival rates configured");
  for (double r : arrival_rates)
    if (!std::isfinite(r) || r <= 0.0)
      throw InputError("arrival rates must be positive");
  for (double r : service_rates)
    if (!std::isfinite(r) || r <= 0.0)
      throw InputError("service rates must be positive");

  switch (topology) {
    case Topology::MulticlassSingleServer:
      if (service_rates.size() != 1)
        throw InputError("multiclass topology needs exactly one service rate");
      if (!class_names.empty() && class_names.size() != arrival_rates.size())
        throw InputError("class_names must match arrival_rates");
      break;
    case Topology::BatchSingleServer:
      if (arrival_rates.size() != 1)
        throw InputError("batch topology needs exactly one arrival rate");
      if (service_rates.size() != 1)
        throw InputError("batch topology needs exactly one service rate");
      batch.validate();
      break;
    case Topology::TandemExport:
      if (arrival_rates.size() != 1)
        throw InputError("tandem topology needs exactly one arrival rate");
      if (service_rates.size() != 3)
        throw InputError(
            "tandem topology needs three service rates (gate, holding, yard)");
      if (gate_count < 1)
        throw InputError("tandem topology requires a positive gate count");
      break;
  }
}

SimResult run_simulation(const SimConfig& config) {
  config.validate();
  Engine engine(config);
  return engine.run();
}

}  // namespace portcap
