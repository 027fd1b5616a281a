#include "cqsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cqsim {

void OnOffModel::validate() const {
  const double probs[] = {p00, p01, p10, p11};
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("onoff: transition probabilities must lie in [0,1]");
  if (std::abs(p00 + p01 - 1.0) > 1e-12 || std::abs(p10 + p11 - 1.0) > 1e-12)
    throw ConfigError("onoff: each row of the transition matrix must sum to 1");
}

double TrafficMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < N; ++j) s += at(i, j);
  return s;
}

double TrafficMatrix::col_sum(int j) const {
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += at(i, j);
  return s;
}

void TrafficMatrix::validate() const {
  constexpr double kSlack = 1e-9;
  if (N < 1 || rates.size() != static_cast<std::size_t>(N) * N)
    throw ConfigError("traffic matrix: shape does not match N");
  for (double v : rates)
    if (!(v >= 0.0)) throw ConfigError("traffic matrix: rates must be non-negative");
  for (int k = 0; k < N; ++k) {
    if (row_sum(k) > 1.0 + kSlack) throw ConfigError("traffic matrix: input row sum exceeds 1");
    if (col_sum(k) > 1.0 + kSlack) throw ConfigError("traffic matrix: output column sum exceeds 1");
  }
}

TrafficMatrix uniform_matrix(int N, double mu) {
  if (N < 1) throw ConfigError("uniform matrix: N must be >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("uniform matrix: load must lie in [0,1]");
  TrafficMatrix m(N);
  std::fill(m.rates.begin(), m.rates.end(), mu / N);
  return m;
}

TrafficMatrix hotspot_matrix(int N, double mu, double a) {
  if (N < 2) throw ConfigError("hotspot: N must be >= 2");
  if (!(mu > 0.0 && mu <= 1.0)) throw ConfigError("hotspot: load must lie in (0,1]");
  if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("hotspot: factor a must lie in [0,1]");
  TrafficMatrix m(N);
  const double off = (1.0 - a) * mu / (N - 1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m.at(i, j) = (i == j) ? a * mu : off;
  return m;
}

TrafficMatrix read_matrix_csv(std::istream& in, int N) {
  TrafficMatrix m(N);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (row >= N) throw ConfigError("traffic matrix: more than N rows");
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= N) throw ConfigError("traffic matrix: more than N columns in row " + std::to_string(row));
      try {
        m.at(row, col) = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("traffic matrix: bad number '" + cell + "'");
      }
      ++col;
    }
    if (col != N) throw ConfigError("traffic matrix: row " + std::to_string(row) + " has wrong width");
    ++row;
  }
  if (row != N) throw ConfigError("traffic matrix: expected N rows");
  m.validate();
  return m;
}

void LrdModel::validate() const {
  if (!(H > 0.5 && H < 1.0)) throw ConfigError("lrd: H must lie in (0.5, 1)");
  if (L < 1) throw ConfigError("lrd: L must be >= 1");
  if (!(mu > 0.0 && mu <= 1.0)) throw ConfigError("lrd: load must lie in (0, 1]");
}

bool bernoulli_next(double rate, RngStream& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("bernoulli: rate must lie in [0,1]");
  return rng.uniform() < rate;
}

OnOffStep onoff_next(const OnOffModel& model, int state, RngStream& rng) {
  const double stay_or_on = state == 1 ? model.p11 : model.p01;
  const int next = rng.uniform() < stay_or_on ? 1 : 0;
  return {next == 1, next};
}

double lrd_mean_on(double H, int L) {
  const double shape = 3.0 - 2.0 * H;
  const double floor = std::pow(static_cast<double>(L) + 1.0, -shape);
  double sum = 0.0;
  for (int k = L; k >= 1; --k) sum += std::pow(static_cast<double>(k), -shape) - floor;
  return sum / (1.0 - floor);
}

LrdProcess::LrdProcess(const LrdModel& model) : model_(model) {
  model_.validate();
  shape_ = 3.0 - 2.0 * model_.H;
  tail_floor_ = std::pow(static_cast<double>(model_.L) + 1.0, -shape_);
  mean_on_ = lrd_mean_on(model_.H, model_.L);
  mean_off_ = mean_on_ * (1.0 - model_.mu) / model_.mu;
  off_continue_ = mean_off_ / (1.0 + mean_off_);
}

int LrdProcess::draw_on_length(RngStream& rng) const {
  // P(X >= k) is proportional to k^-shape - (L+1)^-shape on 1..L.
  const double v = tail_floor_ + (1.0 - tail_floor_) * rng.uniform_pos();
  const double x = std::floor(std::pow(v, -1.0 / shape_));
  return static_cast<int>(std::clamp(x, 1.0, static_cast<double>(model_.L)));
}

std::int64_t LrdProcess::draw_off_length(RngStream& rng) const {
  if (off_continue_ <= 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_pos()) / std::log(off_continue_)));
}

LrdProcess::Step LrdProcess::next(RngStream& rng) {
  if (!started_) {
    started_ = true;
    if (!(rng.uniform() < model_.mu)) remaining_off_ = 1 + draw_off_length(rng);
  }
  if (remaining_off_ > 0) {
    --remaining_off_;
    return {false, false};
  }
  bool start = false;
  if (remaining_on_ == 0) {
    remaining_on_ = draw_on_length(rng);
    start = true;
  }
  if (--remaining_on_ == 0) remaining_off_ = draw_off_length(rng);
  return {true, start};
}

DestinationPicker::DestinationPicker(std::vector<double> weights) {
  cumulative_.reserve(weights.size());
  for (double w : weights) {
    total_ += w;
    cumulative_.push_back(total_);
  }
}

int DestinationPicker::pick(RngStream& rng) const {
  const double u = rng.uniform() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  // skip zero-weight tails that share the same cumulative value
  auto idx = static_cast<int>(it - cumulative_.begin());
  while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
  return idx;
}

namespace {

std::vector<DestinationPicker> row_pickers(const TrafficMatrix& m) {
  std::vector<DestinationPicker> pickers;
  pickers.reserve(m.N);
  for (int i = 0; i < m.N; ++i) {
    std::vector<double> row(m.rates.begin() + static_cast<std::ptrdiff_t>(i) * m.N,
                            m.rates.begin() + static_cast<std::ptrdiff_t>(i + 1) * m.N);
    pickers.emplace_back(std::move(row));
  }
  return pickers;
}

std::vector<RngStream> input_streams(int N, std::uint64_t seed, const char* kind) {
  std::vector<RngStream> s;
  s.reserve(N);
  for (int i = 0; i < N; ++i) s.push_back(derive_stream(seed, std::string("traffic:") + kind + ":in" + std::to_string(i)));
  return s;
}

class BernoulliSource final : public TrafficSource {
 public:
  BernoulliSource(const TrafficMatrix& m, std::uint64_t seed)
      : n_(m.N), pickers_(row_pickers(m)), rngs_(input_streams(m.N, seed, "bernoulli")), seq_(m.N) {}

  void next_slot(Slot slot, std::vector<Cell>& out) override {
    for (int i = 0; i < n_; ++i) {
      auto& rng = rngs_[i];
      if (rng.uniform() < pickers_[i].total()) out.push_back(seq_.make(i, pickers_[i].pick(rng), slot));
    }
  }
  int ports() const override { return n_; }

 private:
  int n_;
  std::vector<DestinationPicker> pickers_;
  std::vector<RngStream> rngs_;
  FlowSequencer seq_;
};

class OnOffSource final : public TrafficSource {
 public:
  OnOffSource(const OnOffModel& model, const TrafficMatrix& dest, std::uint64_t seed)
      : n_(dest.N), model_(model), pickers_(row_pickers(dest)), rngs_(input_streams(dest.N, seed, "onoff")),
        state_(dest.N, 0), dest_(dest.N, 0), seq_(dest.N) {
    model_.validate();
    const double pi1 = model_.p10 + model_.p01 > 0 ? model_.rate() : 0.0;
    for (int i = 0; i < n_; ++i) {
      state_[i] = rngs_[i].uniform() < pi1 ? 1 : 0;
      dest_[i] = pickers_[i].pick(rngs_[i]);
    }
  }

  void next_slot(Slot slot, std::vector<Cell>& out) override {
    for (int i = 0; i < n_; ++i) {
      const int prev = state_[i];
      const auto step = onoff_next(model_, prev, rngs_[i]);
      state_[i] = step.state;
      if (!step.arrival) continue;
      if (prev == 0) dest_[i] = pickers_[i].pick(rngs_[i]);
      out.push_back(seq_.make(i, dest_[i], slot));
    }
  }
  int ports() const override { return n_; }

 private:
  int n_;
  OnOffModel model_;
  std::vector<DestinationPicker> pickers_;
  std::vector<RngStream> rngs_;
  std::vector<int> state_;
  std::vector<int> dest_;
  FlowSequencer seq_;
};

class LrdSource final : public TrafficSource {
 public:
  LrdSource(double H, int L, const TrafficMatrix& dest, std::uint64_t seed)
      : n_(dest.N), pickers_(row_pickers(dest)), rngs_(input_streams(dest.N, seed, "lrd")),
        dest_(dest.N, 0), seq_(dest.N) {
    procs_.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      const double load = pickers_[i].total();
      active_.push_back(load > 0.0);
      procs_.emplace_back(LrdModel{H, L, load > 0.0 ? std::min(load, 1.0) : 1.0});
    }
  }

  void next_slot(Slot slot, std::vector<Cell>& out) override {
    for (int i = 0; i < n_; ++i) {
      if (!active_[i]) continue;
      const auto step = procs_[i].next(rngs_[i]);
      if (!step.arrival) continue;
      if (step.burst_start) dest_[i] = pickers_[i].pick(rngs_[i]);
      out.push_back(seq_.make(i, dest_[i], slot));
    }
  }
  int ports() const override { return n_; }

 private:
  int n_;
  std::vector<DestinationPicker> pickers_;
  std::vector<RngStream> rngs_;
  std::vector<LrdProcess> procs_;
  std::vector<bool> active_;
  std::vector<int> dest_;
  FlowSequencer seq_;
};

class ScheduleSource final : public TrafficSource {
 public:
  ScheduleSource(int N, std::vector<ScheduledCell> cells) : n_(N), cells_(std::move(cells)) {
    for (std::size_t k = 1; k < cells_.size(); ++k) {
      const auto& a = cells_[k - 1];
      const auto& b = cells_[k];
      if (b.slot < a.slot || (b.slot == a.slot && b.input <= a.input))
        throw ConfigError("schedule: cells must be sorted by (slot, input) with one cell per input per slot");
    }
    for (const auto& c : cells_)
      if (c.input < 0 || c.input >= N || c.output < 0 || c.output >= N)
        throw ConfigError("schedule: port index out of range");
  }

  void next_slot(Slot slot, std::vector<Cell>& out) override {
    while (pos_ < cells_.size() && cells_[pos_].slot < slot) ++pos_;
    while (pos_ < cells_.size() && cells_[pos_].slot == slot) {
      const auto& c = cells_[pos_++];
      out.push_back(Cell{c.input, c.output, c.seq, slot, 0, 0});
    }
  }
  int ports() const override { return n_; }

 private:
  int n_;
  std::vector<ScheduledCell> cells_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::int64_t parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": bad integer '" + text + "'");
  }
}

}  // namespace

std::unique_ptr<TrafficSource> make_bernoulli_source(const TrafficMatrix& m, std::uint64_t seed) {
  m.validate();
  return std::make_unique<BernoulliSource>(m, seed);
}

std::unique_ptr<TrafficSource> make_onoff_source(const OnOffModel& model, const TrafficMatrix& dest,
                                                 std::uint64_t seed) {
  dest.validate();
  return std::make_unique<OnOffSource>(model, dest, seed);
}

std::unique_ptr<TrafficSource> make_lrd_source(double H, int L, const TrafficMatrix& dest,
                                               std::uint64_t seed) {
  dest.validate();
  LrdModel{H, L, 1.0}.validate();
  return std::make_unique<LrdSource>(H, L, dest, seed);
}

std::vector<ScheduledCell> ingest_trace(const std::vector<PacketRecord>& records, int input,
                                        int cell_bytes, std::int64_t slot_ns, int N,
                                        const FlowTable& table) {
  if (cell_bytes < 1) throw ConfigError("ingest: cell size must be >= 1 byte");
  if (slot_ns < 1) throw ConfigError("ingest: slot duration must be >= 1 ns");
  if (input < 0 || input >= N) throw ConfigError("ingest: input port out of range");
  std::vector<ScheduledCell> out;
  std::vector<std::uint64_t> next_seq(N, 1);
  Slot next_free = 0;
  std::int64_t last_time = std::numeric_limits<std::int64_t>::min();
  for (const auto& rec : records) {
    if (rec.time_ns < last_time) throw ConfigError("ingest: trace records are not sorted by time_ns");
    last_time = rec.time_ns;
    if (rec.len_bytes < 1) throw ConfigError("ingest: packet length must be >= 1 byte");
    auto it = table.find(rec.flow_key);
    if (it == table.end()) throw ConfigError("ingest: flow key '" + rec.flow_key + "' missing from lookup table");
    const int output = it->second;
    if (output < 0 || output >= N) throw ConfigError("ingest: lookup table maps to a port outside 0..N-1");
    const std::int64_t cells = (rec.len_bytes + cell_bytes - 1) / cell_bytes;
    Slot slot = std::max<Slot>(rec.time_ns / slot_ns, next_free);
    for (std::int64_t c = 0; c < cells; ++c, ++slot) out.push_back({slot, input, output, next_seq[output]++});
    next_free = slot;
  }
  return out;
}

std::vector<PacketRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_ns,len_bytes,flow_key") throw ConfigError("trace: header must be 'time_ns,len_bytes,flow_key'");
  std::vector<PacketRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw ConfigError("trace: line " + std::to_string(lineno) + " must have 3 fields");
    records.push_back({parse_int(f[0], "trace time_ns"), parse_int(f[1], "trace len_bytes"), f[2]});
  }
  return records;
}

FlowTable read_flow_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("flow table: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "flow_key,output_port") throw ConfigError("flow table: header must be 'flow_key,output_port'");
  FlowTable table;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw ConfigError("flow table: each line needs flow_key,output_port");
    table[f[0]] = static_cast<int>(parse_int(f[1], "flow table output_port"));
  }
  return table;
}

std::unique_ptr<TrafficSource> make_schedule_source(int N, std::vector<ScheduledCell> cells) {
  return std::make_unique<ScheduleSource>(N, std::move(cells));
}

std::vector<ScheduledCell> merge_schedules(std::vector<std::vector<ScheduledCell>> per_input) {
  std::vector<ScheduledCell> all;
  for (auto& v : per_input) all.insert(all.end(), v.begin(), v.end());
  std::stable_sort(all.begin(), all.end(), [](const ScheduledCell& a, const ScheduledCell& b) {
    return a.slot != b.slot ? a.slot < b.slot : a.input < b.input;
  });
  std::map<std::pair<int, int>, std::uint64_t> next;
  for (auto& c : all) {
    auto& s = next[{c.input, c.output}];
    c.seq = ++s;
  }
  return all;
}

}  // namespace cqsim
