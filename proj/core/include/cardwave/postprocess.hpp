#ifndef CARDWAVE_POSTPROCESS_HPP
#define CARDWAVE_POSTPROCESS_HPP

#include "cardwave/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cardwave {

/// Voltage samples of one probe node at a uniform recording interval.
struct Trace {
  std::int64_t node = -1;
  std::string name;
  std::vector<double> t_ms;
  std::vector<double> v_mv;

  double sample_interval() const {
    return t_ms.size() > 1 ? t_ms[1] - t_ms[0] : 0.0;
  }
};

/// Per-node scalar (LAT or APD90, ms) with a validity mask; nodes that never
/// produced the feature are invalid.
struct ScalarMap {
  std::vector<double> value;
  std::vector<char> valid;

  std::int64_t size() const { return static_cast<std::int64_t>(value.size()); }
};

/// Streaming LAT/APD90 detection over uniformly sampled voltage fields.
/// Feed snapshots in time order via observe(); the maps refer to each node's
/// first action potential. LAT is the first positive-slope crossing of the
/// threshold (linearly interpolated); APD90 starts at the maximum-dV/dt
/// instant and ends at the first downward crossing of
/// V90 = V_peak - 0.9 (V_peak - V_rest), with V_rest the pre-activation
/// minimum.
class ActivationDetector {
public:
  explicit ActivationDetector(std::int64_t n_nodes, double threshold_mv = 0.0);
  void observe(double t_ms, const std::vector<double>& v);
  ScalarMap lat() const;
  ScalarMap apd90() const;

private:
  struct NodeState {
    double prev_v = 0.0;
    double v_rest = 0.0;
    double max_slope = 0.0;
    double t_max_slope = 0.0;
    double v_peak = 0.0;
    double lat = 0.0;
    double apd = 0.0;
    std::uint8_t phase = 0; // 0 pre, 1 active, 2 done
    std::uint8_t has_lat = 0, has_apd = 0;
  };
  double threshold_;
  double prev_t_ = 0.0;
  bool first_ = true;
  std::vector<NodeState> nodes_;
};

/// LAT map from a dense voltage history (history[k] is the field at
/// times[k]); offline counterpart of ActivationDetector for small problems.
ScalarMap compute_lat(const std::vector<std::vector<double>>& history,
                      const std::vector<double>& times_ms, double threshold_mv = 0.0);

/// APD90 of the single action potential in a trace; nullopt when the trace
/// holds no AP or never repolarizes below V90.
std::optional<double> compute_apd90(const Trace& trace);

/// Conduction velocity from two probes on a LAT map: distance / |LAT_b - LAT_a|.
/// Probes must both be valid and have distinct LATs.
double compute_cv(const Mesh& mesh, const ScalarMap& lat, std::int64_t probe_a,
                  std::int64_t probe_b);

/// Normalized RMS error of `candidate` against `reference` over their common
/// valid mask, normalized by the reference range (u_max - u_min over the
/// reference's valid nodes). Zero reference range is rejected.
double nrmse(const ScalarMap& reference, const ScalarMap& candidate);

/// Shift trace_b so both maximum-dV/dt instants coincide and return the
/// maximum |V_a - V_b| over the overlap. Differences are evaluated on the
/// coarser trace's sample grid; only the finer trace is interpolated.
double align_and_diff(const Trace& trace_a, const Trace& trace_b);

} // namespace cardwave

#endif
