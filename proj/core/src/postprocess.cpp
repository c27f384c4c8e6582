#include "cardwave/postprocess.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cardwave {

namespace {
constexpr double kMinApAmplitude = 20.0; // mV; smaller excursions are not APs
}

ActivationDetector::ActivationDetector(std::int64_t n_nodes, double threshold_mv)
    : threshold_(threshold_mv), nodes_(static_cast<std::size_t>(n_nodes)) {}

void ActivationDetector::observe(double t_ms, const std::vector<double>& v) {
  const std::int64_t n = static_cast<std::int64_t>(nodes_.size());
  if (first_) {
    for (std::int64_t i = 0; i < n; ++i) {
      nodes_[i].prev_v = v[i];
      nodes_[i].v_rest = v[i];
      nodes_[i].max_slope = -std::numeric_limits<double>::infinity();
    }
    prev_t_ = t_ms;
    first_ = false;
    return;
  }
  const double dt = t_ms - prev_t_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    NodeState& nd = nodes_[i];
    if (nd.phase == 2) continue;
    const double vi = v[i];
    const double slope = (vi - nd.prev_v) / dt;
    if (slope > nd.max_slope) {
      nd.max_slope = slope;
      // sub-sample attribution: midpoint of the sample pair
      nd.t_max_slope = prev_t_ + 0.5 * dt;
    }
    if (nd.phase == 0) {
      if (nd.prev_v < threshold_ && vi >= threshold_) {
        nd.lat = prev_t_ + (threshold_ - nd.prev_v) / (vi - nd.prev_v) * dt;
        nd.has_lat = 1;
        nd.phase = 1;
        nd.v_peak = vi;
      } else {
        nd.v_rest = std::min(nd.v_rest, vi);
      }
    } else { // active
      nd.v_peak = std::max(nd.v_peak, vi);
      const double v90 = nd.v_peak - 0.9 * (nd.v_peak - nd.v_rest);
      if (nd.prev_v >= v90 && vi < v90 && nd.v_peak - nd.v_rest >= kMinApAmplitude) {
        const double t_cross = prev_t_ + (nd.prev_v - v90) / (nd.prev_v - vi) * dt;
        nd.apd = t_cross - nd.t_max_slope;
        nd.has_apd = 1;
        nd.phase = 2;
      }
    }
    nd.prev_v = vi;
  }
  prev_t_ = t_ms;
}

ScalarMap ActivationDetector::lat() const {
  ScalarMap m;
  m.value.resize(nodes_.size(), std::numeric_limits<double>::quiet_NaN());
  m.valid.resize(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].has_lat) {
      m.value[i] = nodes_[i].lat;
      m.valid[i] = 1;
    }
  return m;
}

ScalarMap ActivationDetector::apd90() const {
  ScalarMap m;
  m.value.resize(nodes_.size(), std::numeric_limits<double>::quiet_NaN());
  m.valid.resize(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].has_apd) {
      m.value[i] = nodes_[i].apd;
      m.valid[i] = 1;
    }
  return m;
}

ScalarMap compute_lat(const std::vector<std::vector<double>>& history,
                      const std::vector<double>& times_ms, double threshold_mv) {
  if (history.size() != times_ms.size() || history.empty())
    throw ValidationError("compute_lat: history and times must be non-empty and equal length");
  ActivationDetector det(static_cast<std::int64_t>(history.front().size()), threshold_mv);
  for (std::size_t k = 0; k < history.size(); ++k) det.observe(times_ms[k], history[k]);
  return det.lat();
}

std::optional<double> compute_apd90(const Trace& trace) {
  const std::size_t n = trace.t_ms.size();
  if (n < 3) return std::nullopt;

  // onset: maximum finite-difference slope, attributed to the pair midpoint
  double max_slope = -std::numeric_limits<double>::infinity();
  std::size_t slope_idx = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = (trace.v_mv[i + 1] - trace.v_mv[i]) / (trace.t_ms[i + 1] - trace.t_ms[i]);
    if (s > max_slope) {
      max_slope = s;
      slope_idx = i;
    }
  }
  const double t_start = 0.5 * (trace.t_ms[slope_idx] + trace.t_ms[slope_idx + 1]);

  double v_rest = trace.v_mv[0];
  for (std::size_t i = 0; i <= slope_idx; ++i) v_rest = std::min(v_rest, trace.v_mv[i]);

  double v_peak = -std::numeric_limits<double>::infinity();
  std::size_t peak_idx = slope_idx;
  for (std::size_t i = slope_idx; i < n; ++i)
    if (trace.v_mv[i] > v_peak) {
      v_peak = trace.v_mv[i];
      peak_idx = i;
    }
  if (v_peak - v_rest < kMinApAmplitude) return std::nullopt; // no AP

  const double v90 = v_peak - 0.9 * (v_peak - v_rest);
  for (std::size_t i = peak_idx; i + 1 < n; ++i) {
    if (trace.v_mv[i] >= v90 && trace.v_mv[i + 1] < v90) {
      const double frac = (trace.v_mv[i] - v90) / (trace.v_mv[i] - trace.v_mv[i + 1]);
      const double t_cross = trace.t_ms[i] + frac * (trace.t_ms[i + 1] - trace.t_ms[i]);
      return t_cross - t_start;
    }
  }
  return std::nullopt; // never repolarized below V90
}

double compute_cv(const Mesh& mesh, const ScalarMap& lat, std::int64_t probe_a,
                  std::int64_t probe_b) {
  if (probe_a < 0 || probe_b < 0 || probe_a >= lat.size() || probe_b >= lat.size())
    throw ValidationError("compute_cv: probe index out of range");
  if (!lat.valid[probe_a] || !lat.valid[probe_b])
    throw ValidationError("compute_cv: probe never activated");
  const double dlat = std::abs(lat.value[probe_b] - lat.value[probe_a]);
  if (dlat == 0.0) throw ValidationError("compute_cv: equal activation times at the probes");
  const double dx = mesh.node_coords[probe_a][0] - mesh.node_coords[probe_b][0];
  const double dy = mesh.node_coords[probe_a][1] - mesh.node_coords[probe_b][1];
  return std::hypot(dx, dy) / dlat;
}

double nrmse(const ScalarMap& reference, const ScalarMap& candidate) {
  if (reference.size() != candidate.size())
    throw ValidationError("nrmse: maps differ in node count");
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -std::numeric_limits<double>::infinity();
  double sq = 0.0;
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < reference.size(); ++i) {
    if (!reference.valid[i]) continue;
    u_min = std::min(u_min, reference.value[i]);
    u_max = std::max(u_max, reference.value[i]);
    if (!candidate.valid[i]) continue;
    const double d = candidate.value[i] - reference.value[i];
    sq += d * d;
    ++count;
  }
  if (count == 0) throw ValidationError("nrmse: no common valid nodes");
  if (!(u_max > u_min)) throw ValidationError("nrmse: reference range is zero");
  return std::sqrt(sq / static_cast<double>(count)) / (u_max - u_min);
}

namespace {

// Maximum-dV/dt instant of a trace; quadratic refinement over the midpoint
// slopes when neighbours exist.
double max_slope_instant(const Trace& tr) {
  const std::size_t n = tr.t_ms.size();
  if (n < 2) throw ValidationError("align: trace too short");
  std::vector<double> slope(n - 1), mid(n - 1);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    slope[i] = (tr.v_mv[i + 1] - tr.v_mv[i]) / (tr.t_ms[i + 1] - tr.t_ms[i]);
    mid[i] = 0.5 * (tr.t_ms[i] + tr.t_ms[i + 1]);
    if (slope[i] > best) {
      best = slope[i];
      bi = i;
    }
  }
  if (best < kMinApAmplitude / 10.0) // mV/ms; flat trace has no AP upstroke
    throw ValidationError("align: no action potential detected in trace");
  if (bi == 0 || bi + 1 >= slope.size()) return mid[bi];
  const double y0 = slope[bi - 1], y1 = slope[bi], y2 = slope[bi + 1];
  const double den = y0 - 2.0 * y1 + y2;
  if (den >= 0.0) return mid[bi];
  const double delta = 0.5 * (y0 - y2) / den;
  const double h = mid[bi + 1] - mid[bi];
  return mid[bi] + std::clamp(delta, -1.0, 1.0) * h;
}

double interp(const Trace& tr, double t) {
  const auto& ts = tr.t_ms;
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin() || it == ts.end())
    throw ValidationError("align: interpolation outside trace support");
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double f = (t - ts[i]) / (ts[i + 1] - ts[i]);
  return tr.v_mv[i] + f * (tr.v_mv[i + 1] - tr.v_mv[i]);
}

} // namespace

double align_and_diff(const Trace& trace_a, const Trace& trace_b) {
  const double ta = max_slope_instant(trace_a);
  const double tb = max_slope_instant(trace_b);
  const double shift = tb - ta; // b's clock minus a's clock

  // evaluate on the coarser grid, interpolate only the finer trace
  const bool a_coarse = trace_a.sample_interval() >= trace_b.sample_interval();
  const Trace& coarse = a_coarse ? trace_a : trace_b;
  const Trace& fine = a_coarse ? trace_b : trace_a;
  // map a coarse-grid time into the fine trace's clock
  const double to_fine = a_coarse ? shift : -shift;

  double max_diff = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < coarse.t_ms.size(); ++i) {
    const double tf = coarse.t_ms[i] + to_fine;
    if (tf <= fine.t_ms.front() || tf >= fine.t_ms.back()) continue;
    max_diff = std::max(max_diff, std::abs(coarse.v_mv[i] - interp(fine, tf)));
    any = true;
  }
  if (!any) throw ValidationError("align: traces do not overlap after alignment");
  return max_diff;
}

} // namespace cardwave
