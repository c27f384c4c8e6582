#ifndef CARDWAVE_IONIC_HPP
#define CARDWAVE_IONIC_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cardwave {

/// A cell electrophysiology model. Units follow the usual cardiac-simulation
/// convention: V in mV, t in ms, currents normalized by the membrane
/// capacitance (C = 1 uF/cm^2), so rates() returns mV/ms directly.
///
/// rates() is pure and reentrant; implementations must not keep mutable
/// state.
class CellModel {
public:
  virtual ~CellModel() = default;

  virtual const std::string& name() const = 0;
  /// Number of state variables excluding V.
  virtual int state_count() const = 0;
  virtual const std::vector<std::string>& state_names() const = 0;
  /// Quasi-equilibrium state [V, s0, s1, ...] (length state_count() + 1).
  virtual const std::vector<double>& rest_state() const = 0;
  /// Maximum single-cell stable forward-Euler step dt0 (ms), model metadata.
  virtual double stable_step() const = 0;
  /// Documented tolerance for |dV/dt| at rest_state (mV/ms).
  virtual double rest_rate_tolerance() const { return 1e-3; }

  /// dv = -I_ion(V, s)/C + i_stim; ds per model definition.
  virtual void rates(double v, const double* s, double i_stim, double& dv, double* ds) const = 0;
};

/// Structure-of-arrays node state: V, model-state blocks (fixed stride,
/// contiguous per node), and the dV/dt of each node's last completed
/// reaction sub-step.
struct NodeStateArray {
  std::int64_t n_nodes = 0;
  int stride = 0; // max state_count over assigned models
  std::vector<double> v;          // mV, length n_nodes
  std::vector<double> s;          // stride values per node: s[i*stride + k]
  std::vector<double> last_dvdt;  // mV/ms, length n_nodes
  std::vector<std::uint8_t> model_of_node;

  double* states_of(std::int64_t node) { return s.data() + static_cast<std::size_t>(node) * stride; }
  const double* states_of(std::int64_t node) const {
    return s.data() + static_cast<std::size_t>(node) * stride;
  }
  double state(std::int64_t node, int k) const { return states_of(node)[k]; }

  void save(const std::string& path) const;
  static NodeStateArray load(const std::string& path);
};

/// Model registry addressable by name from the CLI config.
/// Known names: "aliev-panfilov", "ohara2011-endo", "ohara2011-epi",
/// "ohara2011-mid", "maccannell2007".
std::shared_ptr<const CellModel> make_model(const std::string& name);
std::vector<std::string> registered_model_names();

/// Result of single-cell pacing.
struct PacingResult {
  std::vector<double> state;       // end-diastolic [V, s...] of the final beat
  double max_rel_change = 0.0;     // between the last two end-diastolic states
  std::vector<double> apd90_ms;    // per beat; NaN where no AP was detected
};

/// Single-cell forward Euler at fixed step dt0/2, stimulated for
/// stim_duration ms at the start of each cycle. Returns the end-diastolic
/// state of the final beat plus a convergence metric. Divergence
/// (|V| > 1000 mV) is rejected with the beat index.
PacingResult pace_to_steady_state(const CellModel& model, double cycle_length_ms, int n_beats,
                                  double stim_amplitude, double stim_duration_ms);

/// Largest single-cell forward-Euler step (5% relative bisection) for which
/// one paced beat completes with finite states and |V| <= 200 mV throughout.
/// Searched in [1e-5, 1] ms; rejected when no stable step exists there.
double estimate_dt0(const CellModel& model);

} // namespace cardwave

#endif
