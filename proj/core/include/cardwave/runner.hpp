#ifndef CARDWAVE_RUNNER_HPP
#define CARDWAVE_RUNNER_HPP

#include "cardwave/config.hpp"
#include "cardwave/output.hpp"
#include "cardwave/splitting.hpp"

#include <iosfwd>
#include <optional>

namespace cardwave {

/// Command-line overrides applied on top of a parsed config.
struct RunOverrides {
  int workers = 0; // 0: keep config / all cores
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  bool strict_substeps = false;
  std::optional<Scheme> scheme; // run a different scheme on the same problem
  bool quiet = false;
};

/// Problem pieces shared between schemes in a comparison run.
struct PreparedProblem {
  Mesh mesh;
  DiffusionField field;
  AssembledOperator op;
  std::vector<std::shared_ptr<const CellModel>> models;
  std::vector<int> model_of_tag;
  std::vector<std::vector<double>> initial_per_model; // post-pacing states
  Protocol protocol;
  std::vector<Probe> probes;
  double assembly_ms = 0.0;
};

/// Build mesh, operator, models (paced when configured), protocol and probes.
PreparedProblem prepare_problem(const RunConfig& cfg, const RunOverrides& ovr);

struct RunArtifacts {
  SimulationResult result;
  RunReport report;
  std::string output_dir;
};

/// Full `run` pipeline: prepare, simulate, write traces/maps/snapshots and
/// report.json under the output directory. `log` receives progress lines.
RunArtifacts cli_run(const RunConfig& cfg, const RunOverrides& ovr, std::ostream* log = nullptr);

/// Simulate one scheme on an already prepared problem (no file output).
SimulationResult run_prepared(const PreparedProblem& prob, SchemeConfig scheme_cfg,
                              std::ostream* log = nullptr);

struct DtsRow {
  double h_um = 0.0;
  std::int64_t nodes = 0;
  std::int64_t elements = 0;
  double dt_s_ms = 0.0;
  double spectral_step_ms = 0.0; // 2/lambda_max when requested, else 0
};

/// Assemble each spacing and evaluate the stable-step formula.
std::vector<DtsRow> cli_dts(const RunConfig& cfg, const RunOverrides& ovr,
                            std::ostream* log = nullptr);

struct SchemeComparison {
  std::string scheme;
  double cv_cm_per_ms = 0.0;             // NaN when probes are unsuitable
  std::vector<double> apd90_per_probe;   // NaN when not measurable
  double wall_ms = 0.0;
  double reaction_ms = 0.0;
  double diffusion_ms = 0.0;
  double e_lat = 0.0;                    // vs reference (0 for the reference)
  double e_apd = 0.0;
  std::vector<double> max_dv_per_probe;  // aligned max |dV| vs reference
};

struct CompareReport {
  std::string reference;
  std::vector<SchemeComparison> schemes;
};

/// Run each scheme on the same prepared problem and compare against the
/// designated reference scheme.
CompareReport cli_compare(const RunConfig& cfg, const std::vector<std::string>& schemes,
                          const RunOverrides& ovr, std::ostream* log = nullptr);

/// Resolve the output directory: override > config > CARDWAVE_OUTPUT_DIR > "out".
std::string resolve_output_dir(const RunConfig& cfg, const RunOverrides& ovr);

} // namespace cardwave

#endif
