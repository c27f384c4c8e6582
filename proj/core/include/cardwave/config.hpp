#ifndef CARDWAVE_CONFIG_HPP
#define CARDWAVE_CONFIG_HPP

#include "cardwave/mesh.hpp"
#include "cardwave/splitting.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cardwave {

struct MeshSpec {
  double lx_cm = 1.0;
  double ly_cm = 1.0;
  double h_cm = 0.01;
  double fiber_angle_rad = 0.0;
};

struct FibrosisSpec {
  bool enabled = false;
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

struct DiffusionSpec {
  double d0_myocyte = 0.0017;  // cm^2/ms
  double d0_fibrotic = 0.00066;
  double rho = 0.25;           // transverse-to-longitudinal ratio
};

struct PacingSpec {
  bool enabled = false;
  double cycle_length_ms = 1000.0;
  int n_beats = 100;
  double stim_amplitude = 80.0; // mV/ms
  double stim_duration_ms = 1.0;
  std::vector<std::string> tags; // tags to pre-pace; empty: every tag
};

struct StimulusSpec {
  std::string label;
  RegionSelector region;
  double t_start_ms = 0.0;
  double duration_ms = 1.0;
  double amplitude = 0.0;
  std::optional<double> period_ms;
};

struct ProbeSpec {
  std::string name;
  double x_cm = 0.0;
  double y_cm = 0.0;
};

struct OutputSpec {
  std::string directory; // empty: resolved from CARDWAVE_OUTPUT_DIR or "out"
  double snapshot_interval_ms = 0.0;
  bool write_maps = true;
  bool write_vtk_maps = false;
  double lat_threshold_mv = 0.0;
  bool dump_operator = false;
};

struct DtsSpec {
  bool enabled = false;
  std::vector<double> spacings_um;
  bool spectral_check = false; // add a brute-force spectral-bound column
};

struct ThresholdSpec {
  bool enabled = false;
  RegionSelector region;
  double duration_ms = 1.0;
  double initial_guess = 1.0;
};

struct CompareSpec {
  std::vector<std::string> schemes;
  std::string reference = "OST";
};

/// A full experiment description; the schema is documented in
/// docs/file_formats.md and echoed verbatim into every run report.
struct RunConfig {
  MeshSpec mesh;
  FibrosisSpec fibrosis;
  DiffusionSpec diffusion;
  std::map<std::string, std::string> models; // tag -> registered model name
  PacingSpec pacing;
  SchemeConfig scheme;
  std::vector<StimulusSpec> protocol;
  std::vector<ProbeSpec> probes;
  OutputSpec output;
  DtsSpec dts;
  ThresholdSpec threshold;
  CompareSpec compare;
  std::string config_echo; // original JSON text
};

/// Parse and validate a config file. All schema violations are collected
/// and reported in one ValidationError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

} // namespace cardwave

#endif
