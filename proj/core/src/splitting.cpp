#include "cardwave/splitting.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cardwave {

namespace {
using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
} // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::OST: return "OST";
    case Scheme::OSTAR: return "OSTAR";
    case Scheme::DAETI: return "DAETI";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "OST") return Scheme::OST;
  if (name == "OSTAR") return Scheme::OSTAR;
  if (name == "DAETI") return Scheme::DAETI;
  throw ValidationError("unknown scheme '" + name + "' (expected OST, OSTAR or DAETI)");
}

void SchemeConfig::validate() const {
  if (!(dt_ms > 0.0)) throw ValidationError("scheme: dt must be positive");
  if (!(t_end_ms >= dt_ms)) throw ValidationError("scheme: T must be >= dt");
  if (k0_down < 1 || k0_up < k0_down)
    throw ValidationError("scheme: need k0_up >= k0_down >= 1");
  if (!(record_interval_ms > 0.0))
    throw ValidationError("scheme: record interval must be positive");
  if (workers < 0) throw ValidationError("scheme: workers must be >= 0");
}

int reaction_substeps(double dvdt_prev, const SchemeConfig& cfg, int k_max) {
  if (cfg.scheme == Scheme::OST) return 1;
  const int k0 = dvdt_prev > 0.0 ? cfg.k0_up : cfg.k0_down;
  const double raw = static_cast<double>(k0) + std::floor(std::abs(dvdt_prev));
  const int k = raw > static_cast<double>(k_max) ? k_max : static_cast<int>(raw);
  return k < 1 ? 1 : k;
}

DiffusionPlan diffusion_substeps(double dt_ms, double dt_s_ms, bool strict, Scheme scheme) {
  if (!(dt_ms > 0.0) || !(dt_s_ms > 0.0))
    throw ValidationError("diffusion sub-steps: dt and dt_s must be positive");
  DiffusionPlan p;
  if (scheme == Scheme::DAETI && dt_ms / 2.0 > dt_s_ms) {
    const double q = dt_ms / (2.0 * dt_s_ms);
    p.l = static_cast<int>(strict ? std::ceil(q) : std::floor(q));
    if (p.l < 1) p.l = 1;
  }
  p.dt_ad = dt_ms / (2.0 * p.l);
  return p;
}

int k_max_for(double dt_ms, const CellModel& model) {
  const int k = static_cast<int>(std::floor(dt_ms / model.stable_step()));
  return k < 1 ? 1 : k;
}

StrangIntegrator::StrangIntegrator(const SimulationSetup& setup, const SchemeConfig& cfg)
    : setup_(setup), cfg_(cfg) {
  cfg.validate();
  if (setup.op == nullptr) throw ValidationError("integrator: missing assembled operator");
  if (setup.models.empty()) throw ValidationError("integrator: no cell models");

  // OSTAR runs at min(dt, dt_s); OST stability is the caller's contract.
  dt_eff_ = cfg.scheme == Scheme::OSTAR ? std::min(cfg.dt_ms, setup.op->dt_s) : cfg.dt_ms;
  plan_ = diffusion_substeps(dt_eff_, setup.op->dt_s, cfg.strict_substeps, cfg.scheme);

  for (const auto& m : setup.models) {
    k_max_of_model_.push_back(k_max_for(dt_eff_, *m));
    k_max_global_ = std::max(k_max_global_, k_max_of_model_.back());
  }
  k_histogram_.assign(static_cast<std::size_t>(k_max_global_) + 1, 0);

#ifdef _OPENMP
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
}

void StrangIntegrator::reaction_step(NodeStateArray& state, double t_ms) {
  const auto t0 = Clock::now();
  const std::int64_t n = state.n_nodes;
  const double dt = dt_eff_;

  std::int64_t bad_node = -1;
  double bad_time = 0.0;
  std::vector<std::int64_t> hist_local(k_histogram_.size(), 0);

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<std::int64_t> hist(k_histogram_.size(), 0);
    double ds[64];
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      const int mid = state.model_of_node[i];
      const CellModel& model = *setup_.models[mid];
      const int k = reaction_substeps(state.last_dvdt[i], cfg_, k_max_of_model_[mid]);
      ++hist[static_cast<std::size_t>(k)];
      const double dt_ar = dt / static_cast<double>(k);
      const int ns = model.state_count();
      double v = state.v[i];
      double* s = state.states_of(i);
      double dv = 0.0;
      for (int j = 0; j < k; ++j) {
        const double t_sub = t_ms + static_cast<double>(j) * dt_ar;
        const double i_stim = setup_.protocol ? setup_.protocol->current(i, t_sub) : 0.0;
        model.rates(v, s, i_stim, dv, ds);
        v += dt_ar * dv;
        for (int q = 0; q < ns; ++q) s[q] += dt_ar * ds[q];
        if (!std::isfinite(v)) {
#ifdef _OPENMP
#pragma omp critical(cw_nan)
#endif
          {
            if (bad_node < 0 || i < bad_node) {
              bad_node = i;
              bad_time = t_sub;
            }
          }
          break;
        }
      }
      state.v[i] = v;
      state.last_dvdt[i] = dv;
    }
#ifdef _OPENMP
#pragma omp critical(cw_hist)
#endif
    for (std::size_t q = 0; q < hist.size(); ++q) hist_local[q] += hist[q];
  }

  for (std::size_t q = 0; q < hist_local.size(); ++q) k_histogram_[q] += hist_local[q];
  timing_.reaction_ms += ms_since(t0);
  if (bad_node >= 0)
    throw InstabilityError("reaction step produced non-finite V", bad_node, bad_time);
}

void StrangIntegrator::diffusion_steps(NodeStateArray& state, int count, double t_ms) {
  const auto t0 = Clock::now();
  for (int c = 0; c < count; ++c) {
    diffusion_substep(*setup_.op, state.v, plan_.dt_ad, v_scratch_);
    state.v.swap(v_scratch_);
    for (std::int64_t i = 0; i < state.n_nodes; ++i)
      if (!std::isfinite(state.v[i])) {
        timing_.diffusion_ms += ms_since(t0);
        throw InstabilityError("diffusion sub-step produced non-finite V", i, t_ms);
      }
  }
  timing_.diffusion_ms += ms_since(t0);
}

void StrangIntegrator::advance(NodeStateArray& state, double t_ms, std::int64_t step_index,
                               std::int64_t n_steps) {
  if (step_index >= n_steps)
    throw ValidationError("integrator: step index past the end of the run");
  if (step_index == 0) diffusion_steps(state, plan_.l, t_ms); // step I
  reaction_step(state, t_ms);                                 // step A
  if (step_index == n_steps - 1)
    diffusion_steps(state, plan_.l, t_ms);      // step III
  else
    diffusion_steps(state, 2 * plan_.l, t_ms);  // merged step B
}

NodeStateArray make_initial_state(const Mesh& mesh,
                                  const std::vector<std::shared_ptr<const CellModel>>& models,
                                  const std::vector<int>& model_of_tag,
                                  const std::vector<std::vector<double>>& initial_per_model) {
  if (model_of_tag.size() != mesh.tag_names.size())
    throw ValidationError("initial state: model_of_tag must cover every mesh tag");
  NodeStateArray st;
  st.n_nodes = mesh.node_count();
  int stride = 1;
  for (const auto& m : models) stride = std::max(stride, m->state_count());
  st.stride = stride;
  st.v.assign(static_cast<std::size_t>(st.n_nodes), 0.0);
  st.s.assign(static_cast<std::size_t>(st.n_nodes) * stride, 0.0);
  st.last_dvdt.assign(static_cast<std::size_t>(st.n_nodes), 0.0);
  st.model_of_node.assign(static_cast<std::size_t>(st.n_nodes), 0);

  for (std::int64_t i = 0; i < st.n_nodes; ++i) {
    const int mid = model_of_tag[static_cast<std::size_t>(mesh.node_tags[i])];
    if (mid < 0 || mid >= static_cast<int>(models.size()))
      throw ValidationError("initial state: tag '" + mesh.tag_of_node(i) + "' has no model");
    const auto& init = (static_cast<std::size_t>(mid) < initial_per_model.size() &&
                        !initial_per_model[static_cast<std::size_t>(mid)].empty())
                           ? initial_per_model[static_cast<std::size_t>(mid)]
                           : models[static_cast<std::size_t>(mid)]->rest_state();
    if (static_cast<int>(init.size()) != models[static_cast<std::size_t>(mid)]->state_count() + 1)
      throw ValidationError("initial state: wrong state vector length for model " +
                            models[static_cast<std::size_t>(mid)]->name());
    st.model_of_node[i] = static_cast<std::uint8_t>(mid);
    st.v[i] = init[0];
    double* s = st.states_of(i);
    for (int k = 0; k < models[static_cast<std::size_t>(mid)]->state_count(); ++k)
      s[k] = init[static_cast<std::size_t>(k) + 1];
  }
  return st;
}

SimulationResult run_simulation(NodeStateArray state, const SimulationSetup& setup,
                                const SchemeConfig& cfg) {
  const auto t_run0 = Clock::now();
  StrangIntegrator integrator(setup, cfg);
  const double dt = integrator.dt_effective();
  const std::int64_t n_steps =
      static_cast<std::int64_t>(std::ceil(cfg.t_end_ms / dt - 1e-9));

  const std::int64_t steps_per_record =
      std::max<std::int64_t>(1, std::llround(cfg.record_interval_ms / dt));
  const std::int64_t steps_per_map =
      std::max<std::int64_t>(1, std::llround(setup.map_interval_ms / dt));
  const std::int64_t steps_per_snapshot =
      setup.snapshot_interval_ms > 0.0
          ? std::max<std::int64_t>(1, std::llround(setup.snapshot_interval_ms / dt))
          : 0;

  SimulationResult result;
  result.dt_effective = dt;
  result.dt_s = setup.op->dt_s;
  result.plan = integrator.plan();
  result.n_steps = n_steps;
  for (const auto& p : setup.probes) {
    Trace tr;
    tr.node = p.node;
    tr.name = p.name;
    result.traces.push_back(std::move(tr));
  }

  ActivationDetector detector(state.n_nodes, setup.lat_threshold_mv);
  TimingBreakdown& timing = result.timing;

  auto record_traces = [&](double t_now) {
    const auto t0 = Clock::now();
    for (std::size_t p = 0; p < setup.probes.size(); ++p) {
      result.traces[p].t_ms.push_back(t_now);
      result.traces[p].v_mv.push_back(state.v[setup.probes[p].node]);
    }
    timing.recording_ms += ms_since(t0);
  };
  auto record_maps = [&](double t_now) {
    const auto t0 = Clock::now();
    detector.observe(t_now, state.v);
    timing.recording_ms += ms_since(t0);
  };

  record_traces(0.0);
  record_maps(0.0);
  if (steps_per_snapshot > 0 && setup.on_snapshot) setup.on_snapshot(0.0, state.v);

  for (std::int64_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    integrator.advance(state, t, step, n_steps);
    const double t_next = static_cast<double>(step + 1) * dt;
    // record only at whole intervals so traces stay uniformly sampled
    if ((step + 1) % steps_per_record == 0) record_traces(t_next);
    if ((step + 1) % steps_per_map == 0) record_maps(t_next);
    if (steps_per_snapshot > 0 && setup.on_snapshot && (step + 1) % steps_per_snapshot == 0)
      setup.on_snapshot(t_next, state.v);
    if (setup.progress_every > 0 && setup.on_progress && (step + 1) % setup.progress_every == 0) {
      TimingBreakdown sofar = integrator.timing();
      sofar.recording_ms = timing.recording_ms;
      sofar.total_ms = ms_since(t_run0);
      setup.on_progress(step + 1, t_next, sofar);
    }
  }

  result.lat_map = detector.lat();
  result.apd90_map = detector.apd90();
  result.k_histogram = integrator.k_histogram();
  timing.reaction_ms = integrator.timing().reaction_ms;
  timing.diffusion_ms = integrator.timing().diffusion_ms;
  timing.total_ms = ms_since(t_run0);
  result.final_state = std::move(state);
  return result;
}

} // namespace cardwave
