#ifndef CARDWAVE_STIMULUS_HPP
#define CARDWAVE_STIMULUS_HPP

#include "cardwave/fem.hpp"
#include "cardwave/ionic.hpp"
#include "cardwave/mesh.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cardwave {

/// A stimulus delivered to a node set. Activation windows are half-open:
/// single shot is active for t in [t_start, t_start + duration); periodic
/// for t >= t_start with mod(t - t_start, period) in [0, duration).
struct Stimulus {
  std::vector<std::int64_t> nodes;   // sorted
  double t_start_ms = 0.0;
  double duration_ms = 1.0;
  double amplitude = 0.0;            // mV/ms, depolarizing positive
  std::optional<double> period_ms;   // nullopt: single shot
  std::string label;

  bool active_at(double t_ms) const;
};

/// Ordered stimulus list; currents of overlapping stimuli sum.
struct Protocol {
  std::vector<Stimulus> entries;
};

/// Compiled per-node view of a protocol for the inner reaction loop:
/// stim_current summed over all entries containing the node.
class ProtocolIndex {
public:
  ProtocolIndex(const Protocol& protocol, std::int64_t n_nodes);
  /// Sum of currents at (node, t). Pure; safe to call concurrently.
  double current(std::int64_t node, double t_ms) const;
  /// True when no stimulus covers any node (protocol at rest).
  bool empty() const { return entries_.empty(); }

private:
  struct Entry {
    double t_start, duration, amplitude;
    std::optional<double> period;
  };
  std::vector<Entry> entries_;
  std::vector<std::vector<std::int32_t>> node_entries_; // entry ids per node
};

/// Scalar current lookup straight from the protocol (test/reference path).
double stim_current(const Protocol& protocol, std::int64_t node, double t_ms);

/// One periodic stimulus per (node set, onset delay) group; a blocked group
/// is expressed by omitting it from the list.
Protocol grouped_delays(const std::vector<std::pair<std::vector<std::int64_t>, double>>& groups,
                        double period_ms, double duration_ms, double amplitude);

/// Options for the diastolic-threshold bisection.
struct ThresholdOptions {
  double duration_ms = 1.0;       // stimulus duration of the template
  double upper_factor = 1000.0;   // initial upper bracket multiplier
  double initial_guess = 1.0;     // mV/ms
  double rel_tol = 0.05;
  double window_ms = 50.0;        // propagation deadline after stimulus onset
  double dt_ms = 0.05;            // fixed-step integration of the probe runs
};

/// Minimum single-shot amplitude on `stim_nodes` that produces a propagated
/// response (V > 0 mV at a probe node >= 1 cm away within the window),
/// bisected to 5% relative tolerance. Tissue starts from the model rest
/// state. Rejected when even upper_factor * initial_guess does not propagate.
double diastolic_threshold(const Mesh& mesh, const AssembledOperator& op, const CellModel& model,
                           const std::vector<std::int64_t>& stim_nodes,
                           const ThresholdOptions& options = {});

} // namespace cardwave

#endif
