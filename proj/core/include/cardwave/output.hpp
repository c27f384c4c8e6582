#ifndef CARDWAVE_OUTPUT_HPP
#define CARDWAVE_OUTPUT_HPP

#include "cardwave/mesh.hpp"
#include "cardwave/postprocess.hpp"
#include "cardwave/splitting.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cardwave {

/// Legacy-format VTK unstructured grid with V as point data. Formatting is
/// fixed ("%.9g"), so output is byte-stable for identical inputs.
void write_vtk_snapshot(const Mesh& mesh, const std::vector<double>& v, double t_ms,
                        const std::string& path);

/// node,x,y,value,valid map export ("%.17g", byte-stable).
void write_map_csv(const Mesh& mesh, const ScalarMap& map, const std::string& path);

/// VTK point-data export of a scalar map (invalid nodes carry NaN).
void write_map_vtk(const Mesh& mesh, const ScalarMap& map, const std::string& name,
                   const std::string& path);

/// t_ms,v_mv trace export ("%.17g", byte-stable).
void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(const std::string& path);

/// Wall-clock totals and run metadata; serialized as report.json.
struct RunReport {
  std::string scheme;
  double dt_ms = 0.0;
  double dt_effective_ms = 0.0;
  double dt_s_ms = 0.0;
  double dt_ad_ms = 0.0;
  int l = 1;
  double t_end_ms = 0.0;
  std::int64_t n_steps = 0;
  double total_wall_ms = 0.0;
  double assembly_ms = 0.0;
  double reaction_ms = 0.0;
  double diffusion_ms = 0.0;
  double output_ms = 0.0;
  std::vector<std::int64_t> k_histogram;
  int workers = 0;
  std::uint64_t fibrosis_seed = 0;
  std::string fibrosis_rng;
  std::string config_echo; // verbatim config text, for reproducibility
};

void write_report_json(const RunReport& report, const std::string& path);

} // namespace cardwave

#endif
