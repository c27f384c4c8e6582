#ifndef CARDWAVE_SPLITTING_HPP
#define CARDWAVE_SPLITTING_HPP

#include "cardwave/fem.hpp"
#include "cardwave/ionic.hpp"
#include "cardwave/postprocess.hpp"
#include "cardwave/stimulus.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cardwave {

/// The three evaluated schemes: fixed-step Strang splitting (OST), splitting
/// with adaptive reaction sub-stepping (OSTAR), and adaptive sub-stepping of
/// both reaction and diffusion (DAETI).
enum class Scheme { OST, OSTAR, DAETI };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::DAETI;
  double dt_ms = 0.1;             // global step (OST conventionally 0.01)
  double t_end_ms = 500.0;
  int k0_up = 5;                  // k0 for dV/dt > 0
  int k0_down = 1;                // k0 for dV/dt <= 0
  bool strict_substeps = false;   // ceil instead of floor in the l rule
  double record_interval_ms = 1.0;
  int workers = 0;                // 0: all available cores

  void validate() const; // throws ValidationError
};

/// Reaction sub-step count for one node:
///   k0 = k0_up if dV/dt > 0 else k0_down;
///   k  = clamp(k0 + floor(|dV/dt|), 1, k_max).
/// OST never adapts (always 1).
int reaction_substeps(double dvdt_prev, const SchemeConfig& cfg, int k_max);

struct DiffusionPlan {
  int l = 1;
  double dt_ad = 0.0; // = dt / (2 l)
};

/// Diffusion sub-step count:
///   l = floor(dt / (2 dt_s)) if dt/2 > dt_s else 1,
/// or ceil in strict mode, which guarantees dt_ad <= dt_s.
/// Only DAETI adapts; OST and OSTAR always return l = 1.
DiffusionPlan diffusion_substeps(double dt_ms, double dt_s_ms, bool strict, Scheme scheme);

/// Per-model reaction limit k_max = max(1, floor(dt / dt0)).
int k_max_for(double dt_ms, const CellModel& model);

struct TimingBreakdown {
  double total_ms = 0.0;
  double reaction_ms = 0.0;
  double diffusion_ms = 0.0;
  double recording_ms = 0.0;
};

struct SimulationResult {
  std::vector<Trace> traces;
  ScalarMap lat_map;
  ScalarMap apd90_map;
  TimingBreakdown timing;
  std::vector<std::int64_t> k_histogram; // index k = 1..k_max
  double dt_effective = 0.0;             // OSTAR runs at min(dt, dt_s)
  double dt_s = 0.0;
  DiffusionPlan plan;
  std::int64_t n_steps = 0;
  NodeStateArray final_state;
};

struct Probe {
  std::int64_t node = -1;
  std::string name;
};

/// Everything run_simulation needs besides the state and scheme.
struct SimulationSetup {
  const AssembledOperator* op = nullptr;
  std::vector<std::shared_ptr<const CellModel>> models; // indexed by model id
  const ProtocolIndex* protocol = nullptr;              // may be null (no stimulus)
  std::vector<Probe> probes;
  double lat_threshold_mv = 0.0;
  double map_interval_ms = 1.0; // LAT/APD detector sampling cadence
  double snapshot_interval_ms = 0.0; // 0: no snapshots
  std::function<void(double t_ms, const std::vector<double>& v)> on_snapshot;
  std::function<void(std::int64_t step, double t_ms, const TimingBreakdown&)> on_progress;
  std::int64_t progress_every = 0;   // steps; 0: no progress callbacks
};

/// One Strang step over [t, t + dt_eff]. The first global step opens with
/// the half-interval diffusion sub-steps (step I); every step then runs the
/// per-node adaptive reaction (step A) and closes with either the merged
/// full-interval diffusion (step B) or, on the final step, the closing
/// half-interval sub-steps (step III).
class StrangIntegrator {
public:
  StrangIntegrator(const SimulationSetup& setup, const SchemeConfig& cfg);

  void advance(NodeStateArray& state, double t_ms, std::int64_t step_index,
               std::int64_t n_steps);

  double dt_effective() const { return dt_eff_; }
  const DiffusionPlan& plan() const { return plan_; }
  int k_max_global() const { return k_max_global_; }
  const std::vector<std::int64_t>& k_histogram() const { return k_histogram_; }
  const TimingBreakdown& timing() const { return timing_; }

private:
  void reaction_step(NodeStateArray& state, double t_ms);
  void diffusion_steps(NodeStateArray& state, int count, double t_ms);

  const SimulationSetup& setup_;
  const SchemeConfig& cfg_;
  double dt_eff_;
  DiffusionPlan plan_;
  std::vector<int> k_max_of_model_;
  int k_max_global_ = 1;
  std::vector<std::int64_t> k_histogram_;
  std::vector<double> v_scratch_;
  TimingBreakdown timing_;
};

/// Build the initial tissue state: each node starts from its model's rest
/// state (or a supplied per-model state, e.g. after steady-state pacing).
NodeStateArray make_initial_state(const Mesh& mesh,
                                  const std::vector<std::shared_ptr<const CellModel>>& models,
                                  const std::vector<int>& model_of_tag,
                                  const std::vector<std::vector<double>>& initial_per_model = {});

/// Advance ceil(T / dt_eff) Strang steps, recording probe traces and
/// streaming LAT/APD maps every record interval. Deterministic for any
/// worker count.
SimulationResult run_simulation(NodeStateArray state, const SimulationSetup& setup,
                                const SchemeConfig& cfg);

} // namespace cardwave

#endif
