#include "cardwave/stimulus.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cardwave {

bool Stimulus::active_at(double t_ms) const {
  if (t_ms < t_start_ms) return false;
  if (!period_ms) return t_ms < t_start_ms + duration_ms;
  const double phase = std::fmod(t_ms - t_start_ms, *period_ms);
  return phase < duration_ms;
}

ProtocolIndex::ProtocolIndex(const Protocol& protocol, std::int64_t n_nodes)
    : node_entries_(static_cast<std::size_t>(n_nodes)) {
  for (const auto& st : protocol.entries) {
    if (!(st.duration_ms > 0.0)) throw ValidationError("stimulus: duration must be positive");
    if (!std::isfinite(st.amplitude)) throw ValidationError("stimulus: amplitude must be finite");
    if (st.nodes.empty()) throw ValidationError("stimulus: node set is empty");
    const std::int32_t id = static_cast<std::int32_t>(entries_.size());
    entries_.push_back({st.t_start_ms, st.duration_ms, st.amplitude, st.period_ms});
    for (auto n : st.nodes) {
      if (n < 0 || n >= n_nodes)
        throw ValidationError("stimulus: node " + std::to_string(n) + " out of range");
      node_entries_[static_cast<std::size_t>(n)].push_back(id);
    }
  }
}

double ProtocolIndex::current(std::int64_t node, double t_ms) const {
  double sum = 0.0;
  for (auto id : node_entries_[static_cast<std::size_t>(node)]) {
    const Entry& e = entries_[static_cast<std::size_t>(id)];
    if (t_ms < e.t_start) continue;
    if (e.period) {
      if (std::fmod(t_ms - e.t_start, *e.period) < e.duration) sum += e.amplitude;
    } else if (t_ms < e.t_start + e.duration) {
      sum += e.amplitude;
    }
  }
  return sum;
}

double stim_current(const Protocol& protocol, std::int64_t node, double t_ms) {
  double sum = 0.0;
  for (const auto& st : protocol.entries)
    if (st.active_at(t_ms) && std::binary_search(st.nodes.begin(), st.nodes.end(), node))
      sum += st.amplitude;
  return sum;
}

Protocol grouped_delays(const std::vector<std::pair<std::vector<std::int64_t>, double>>& groups,
                        double period_ms, double duration_ms, double amplitude) {
  Protocol p;
  for (const auto& [nodes, delay] : groups) {
    if (delay < 0.0) throw ValidationError("grouped stimuli: delays must be >= 0");
    Stimulus st;
    st.nodes = nodes;
    std::sort(st.nodes.begin(), st.nodes.end());
    st.t_start_ms = delay;
    st.duration_ms = duration_ms;
    st.amplitude = amplitude;
    st.period_ms = period_ms;
    p.entries.push_back(std::move(st));
  }
  return p;
}

namespace {

// Fixed-step monodomain probe run from rest: does `amplitude` on stim_nodes
// drive the probe node above 0 mV within the window?
bool propagates(const Mesh& mesh, const AssembledOperator& op, const CellModel& model,
                const std::vector<std::int64_t>& stim_nodes, std::int64_t probe, double amplitude,
                const ThresholdOptions& opt) {
  const std::int64_t n = mesh.node_count();
  const int ns = model.state_count();
  const auto& rest = model.rest_state();

  std::vector<double> v(static_cast<std::size_t>(n), rest[0]);
  std::vector<double> states(static_cast<std::size_t>(n) * ns); // node-major
  for (std::int64_t i = 0; i < n; ++i)
    for (int k = 0; k < ns; ++k) states[static_cast<std::size_t>(i) * ns + k] = rest[1 + k];
  std::vector<char> stimulated(static_cast<std::size_t>(n), 0);
  for (auto i : stim_nodes) stimulated[static_cast<std::size_t>(i)] = 1;

  const double dt = std::min({opt.dt_ms, model.stable_step() / 2.0, op.dt_s});
  const std::int64_t steps = static_cast<std::int64_t>(std::ceil(opt.window_ms / dt));
  std::vector<double> v_next(v.size());
  double ds[64];
  for (std::int64_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    for (std::int64_t i = 0; i < n; ++i) {
      double dv;
      const double i_stim = (stimulated[i] && t < opt.duration_ms) ? amplitude : 0.0;
      double* si = states.data() + static_cast<std::size_t>(i) * ns;
      model.rates(v[i], si, i_stim, dv, ds);
      v[i] += dt * dv;
      for (int k = 0; k < ns; ++k) si[k] += dt * ds[k];
      if (!std::isfinite(v[i]))
        throw InstabilityError("threshold probe run diverged", i, t);
    }
    diffusion_substep(op, v, dt, v_next);
    v.swap(v_next);
    if (v[probe] > 0.0) return true;
  }
  return false;
}

} // namespace

double diastolic_threshold(const Mesh& mesh, const AssembledOperator& op, const CellModel& model,
                           const std::vector<std::int64_t>& stim_nodes,
                           const ThresholdOptions& opt) {
  if (stim_nodes.empty()) throw ValidationError("threshold: stimulus node set is empty");

  // Probe: the node farthest from the stimulus region, required >= 1 cm away.
  std::int64_t probe = -1;
  double best = -1.0;
  for (std::int64_t i = 0; i < mesh.node_count(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (auto sn : stim_nodes) {
      const double dx = mesh.node_coords[i][0] - mesh.node_coords[sn][0];
      const double dy = mesh.node_coords[i][1] - mesh.node_coords[sn][1];
      dmin = std::min(dmin, std::hypot(dx, dy));
    }
    if (dmin > best) {
      best = dmin;
      probe = i;
    }
  }
  if (best < 1.0)
    throw ValidationError("threshold: no probe node >= 1 cm from the stimulus region");

  // Upper bracket: grow from the initial guess until the wave propagates.
  const double cap = opt.upper_factor * opt.initial_guess;
  double lo = 0.0; // amplitude 0 never propagates
  double hi = opt.initial_guess;
  while (!propagates(mesh, op, model, stim_nodes, probe, hi, opt)) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap)
      throw ValidationError("threshold: no propagation at upper bracket " + std::to_string(cap));
  }

  while ((hi - lo) / hi > opt.rel_tol) {
    const double mid = 0.5 * (lo + hi);
    if (propagates(mesh, op, model, stim_nodes, probe, mid, opt))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

} // namespace cardwave
