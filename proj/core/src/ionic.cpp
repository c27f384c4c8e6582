#include "cardwave/ionic.hpp"

#include "cardwave/errors.hpp"
#include "models_detail.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace cardwave {

void NodeStateArray::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("state: cannot open for write: " + path);
  const char magic[8] = {'c', 'w', 's', 't', 'a', 't', 'e', '1'};
  f.write(magic, 8);
  const std::int64_t st = stride;
  f.write(reinterpret_cast<const char*>(&n_nodes), 8);
  f.write(reinterpret_cast<const char*>(&st), 8);
  auto wr = [&](const auto& vec) {
    f.write(reinterpret_cast<const char*>(vec.data()),
            static_cast<std::streamsize>(vec.size() * sizeof(vec[0])));
  };
  wr(v);
  wr(s);
  wr(last_dvdt);
  wr(model_of_node);
  if (!f) throw IoError("state: write failed: " + path);
}

NodeStateArray NodeStateArray::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("state: cannot open for read: " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::string(magic, 8) != "cwstate1") throw IoError("state: bad magic in " + path);
  NodeStateArray a;
  std::int64_t st = 0;
  f.read(reinterpret_cast<char*>(&a.n_nodes), 8);
  f.read(reinterpret_cast<char*>(&st), 8);
  a.stride = static_cast<int>(st);
  a.v.resize(static_cast<std::size_t>(a.n_nodes));
  a.s.resize(static_cast<std::size_t>(a.n_nodes) * static_cast<std::size_t>(a.stride));
  a.last_dvdt.resize(static_cast<std::size_t>(a.n_nodes));
  a.model_of_node.resize(static_cast<std::size_t>(a.n_nodes));
  auto rd = [&](auto& vec) {
    f.read(reinterpret_cast<char*>(vec.data()),
           static_cast<std::streamsize>(vec.size() * sizeof(vec[0])));
  };
  rd(a.v);
  rd(a.s);
  rd(a.last_dvdt);
  rd(a.model_of_node);
  if (!f) throw IoError("state: truncated file: " + path);
  return a;
}

std::shared_ptr<const CellModel> make_model(const std::string& name) {
  if (name == "aliev-panfilov") return detail::make_aliev_panfilov();
  if (name == "ohara2011-endo") return detail::make_ohara_rudy(0);
  if (name == "ohara2011-epi") return detail::make_ohara_rudy(1);
  if (name == "ohara2011-mid") return detail::make_ohara_rudy(2);
  if (name == "maccannell2007") return detail::make_maccannell();
  throw ValidationError("unknown cell model: '" + name + "'");
}

std::vector<std::string> registered_model_names() {
  return {"aliev-panfilov", "ohara2011-endo", "ohara2011-epi", "ohara2011-mid", "maccannell2007"};
}

namespace {

// One forward-Euler update of a single cell. Returns false on non-finite V.
inline bool euler_step(const CellModel& model, std::vector<double>& st, double i_stim, double dt) {
  const int ns = model.state_count();
  double dv = 0.0;
  double ds[64];
  model.rates(st[0], st.data() + 1, i_stim, dv, ds);
  st[0] += dt * dv;
  for (int k = 0; k < ns; ++k) st[1 + k] += dt * ds[k];
  return std::isfinite(st[0]);
}

// APD90 bookkeeping for one beat of a single-cell trace: onset at maximum
// dV/dt, V90 from the beat's own rest and peak.
struct BeatMarkers {
  double v_rest = 0.0;
  double max_slope = -std::numeric_limits<double>::infinity();
  double t_max_slope = std::numeric_limits<double>::quiet_NaN();
  double v_peak = -std::numeric_limits<double>::infinity();
  double apd90 = std::numeric_limits<double>::quiet_NaN();
  bool closed = false;

  void begin(double v0) {
    v_rest = v0;
    max_slope = -std::numeric_limits<double>::infinity();
    t_max_slope = std::numeric_limits<double>::quiet_NaN();
    v_peak = -std::numeric_limits<double>::infinity();
    apd90 = std::numeric_limits<double>::quiet_NaN();
    closed = false;
  }
  void update(double t, double v, double slope) {
    if (closed) return;
    if (slope > max_slope) {
      max_slope = slope;
      t_max_slope = t;
    }
    if (v > v_peak) v_peak = v;
    if (std::isfinite(t_max_slope) && v_peak > 0.0) {
      const double v90 = v_peak - 0.9 * (v_peak - v_rest);
      if (v < v90 && v_peak - v_rest > 20.0) {
        apd90 = t - t_max_slope;
        closed = true;
      }
    }
  }
};

} // namespace

PacingResult pace_to_steady_state(const CellModel& model, double cycle_length_ms, int n_beats,
                                  double stim_amplitude, double stim_duration_ms) {
  if (n_beats < 1) throw ValidationError("pacing: n_beats must be >= 1");
  if (!(cycle_length_ms > 0.0)) throw ValidationError("pacing: cycle length must be positive");

  const double dt = model.stable_step() / 2.0;
  const std::int64_t steps_per_beat = static_cast<std::int64_t>(std::llround(cycle_length_ms / dt));

  std::vector<double> st = model.rest_state();
  std::vector<double> prev_eds, eds;
  PacingResult result;

  for (int beat = 0; beat < n_beats; ++beat) {
    BeatMarkers markers;
    markers.begin(st[0]);
    double v_prev = st[0];
    for (std::int64_t i = 0; i < steps_per_beat; ++i) {
      const double t_in_beat = static_cast<double>(i) * dt;
      const double i_stim = t_in_beat < stim_duration_ms ? stim_amplitude : 0.0;
      if (!euler_step(model, st, i_stim, dt))
        throw InstabilityError("pacing: " + model.name() + " diverged at beat " +
                                   std::to_string(beat),
                               -1, beat * cycle_length_ms + t_in_beat);
      if (std::abs(st[0]) > 1000.0)
        throw InstabilityError("pacing: |V| > 1000 mV at beat " + std::to_string(beat), -1,
                               beat * cycle_length_ms + t_in_beat);
      markers.update(t_in_beat + dt, st[0], (st[0] - v_prev) / dt);
      v_prev = st[0];
    }
    result.apd90_ms.push_back(markers.apd90);
    prev_eds = std::move(eds);
    eds = st;
  }

  result.state = st;
  if (!prev_eds.empty()) {
    double max_rel = 0.0;
    for (std::size_t k = 0; k < eds.size(); ++k) {
      const double scale = std::max(std::abs(prev_eds[k]), std::abs(eds[k]));
      if (scale > 1e-12)
        max_rel = std::max(max_rel, std::abs(eds[k] - prev_eds[k]) / scale);
    }
    result.max_rel_change = max_rel;
  }
  return result;
}

namespace {

// One paced beat at a candidate step: finite states and |V| <= 200 throughout.
bool beat_completes(const CellModel& model, double dt) {
  const double beat_ms = 500.0;
  const double stim_amplitude = 80.0, stim_duration = 1.0;
  std::vector<double> st = model.rest_state();
  const std::int64_t steps = static_cast<std::int64_t>(std::ceil(beat_ms / dt));
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (!euler_step(model, st, t < stim_duration ? stim_amplitude : 0.0, dt)) return false;
    if (!(std::abs(st[0]) <= 200.0)) return false;
    for (int k = 0; k < model.state_count(); ++k)
      if (!std::isfinite(st[1 + k])) return false;
  }
  return true;
}

} // namespace

double estimate_dt0(const CellModel& model) {
  double lo = 1e-5, hi = 1.0;
  if (!beat_completes(model, lo))
    throw ValidationError("estimate_dt0: no stable step in [1e-5, 1] ms for " + model.name());
  if (beat_completes(model, hi)) return hi;
  while ((hi - lo) / lo > 0.05) {
    const double mid = std::sqrt(lo * hi);
    if (beat_completes(model, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

} // namespace cardwave
