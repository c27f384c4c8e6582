#include "cardwave/output.hpp"

#include "cardwave/errors.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <memory>

namespace cardwave {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const std::string& path) {
  File f(std::fopen(path.c_str(), "w"));
  if (!f) throw IoError("cannot open for write: " + path);
  return f;
}

} // namespace

void write_vtk_snapshot(const Mesh& mesh, const std::vector<double>& v, double t_ms,
                        const std::string& path) {
  if (static_cast<std::int64_t>(v.size()) != mesh.node_count())
    throw ValidationError("vtk: field length does not match node count");
  File f = open_for_write(path);
  std::fprintf(f.get(), "# vtk DataFile Version 3.0\n");
  std::fprintf(f.get(), "transmembrane potential at t = %.9g ms\n", t_ms);
  std::fprintf(f.get(), "ASCII\nDATASET UNSTRUCTURED_GRID\n");
  std::fprintf(f.get(), "POINTS %" PRId64 " double\n", mesh.node_count());
  for (std::int64_t i = 0; i < mesh.node_count(); ++i)
    std::fprintf(f.get(), "%.9g %.9g 0\n", mesh.node_coords[i][0], mesh.node_coords[i][1]);
  std::fprintf(f.get(), "CELLS %" PRId64 " %" PRId64 "\n", mesh.element_count(),
               5 * mesh.element_count());
  for (const auto& e : mesh.elements)
    std::fprintf(f.get(), "4 %" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 "\n", e[0], e[1], e[2],
                 e[3]);
  std::fprintf(f.get(), "CELL_TYPES %" PRId64 "\n", mesh.element_count());
  for (std::int64_t e = 0; e < mesh.element_count(); ++e) std::fprintf(f.get(), "9\n");
  std::fprintf(f.get(), "POINT_DATA %" PRId64 "\n", mesh.node_count());
  std::fprintf(f.get(), "SCALARS V double 1\nLOOKUP_TABLE default\n");
  for (double x : v) std::fprintf(f.get(), "%.9g\n", x);
  if (std::ferror(f.get())) throw IoError("vtk: write failed: " + path);
}

void write_map_csv(const Mesh& mesh, const ScalarMap& map, const std::string& path) {
  if (map.size() != mesh.node_count())
    throw ValidationError("map csv: size does not match node count");
  File f = open_for_write(path);
  std::fprintf(f.get(), "node,x_cm,y_cm,value_ms,valid\n");
  for (std::int64_t i = 0; i < map.size(); ++i)
    std::fprintf(f.get(), "%" PRId64 ",%.17g,%.17g,%.17g,%d\n", i, mesh.node_coords[i][0],
                 mesh.node_coords[i][1], map.valid[i] ? map.value[i] : 0.0,
                 map.valid[i] ? 1 : 0);
  if (std::ferror(f.get())) throw IoError("map csv: write failed: " + path);
}

void write_map_vtk(const Mesh& mesh, const ScalarMap& map, const std::string& name,
                   const std::string& path) {
  if (map.size() != mesh.node_count())
    throw ValidationError("map vtk: size does not match node count");
  File f = open_for_write(path);
  std::fprintf(f.get(), "# vtk DataFile Version 3.0\n%s map\nASCII\nDATASET UNSTRUCTURED_GRID\n",
               name.c_str());
  std::fprintf(f.get(), "POINTS %" PRId64 " double\n", mesh.node_count());
  for (std::int64_t i = 0; i < mesh.node_count(); ++i)
    std::fprintf(f.get(), "%.9g %.9g 0\n", mesh.node_coords[i][0], mesh.node_coords[i][1]);
  std::fprintf(f.get(), "CELLS %" PRId64 " %" PRId64 "\n", mesh.element_count(),
               5 * mesh.element_count());
  for (const auto& e : mesh.elements)
    std::fprintf(f.get(), "4 %" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 "\n", e[0], e[1], e[2],
                 e[3]);
  std::fprintf(f.get(), "CELL_TYPES %" PRId64 "\n", mesh.element_count());
  for (std::int64_t e = 0; e < mesh.element_count(); ++e) std::fprintf(f.get(), "9\n");
  std::fprintf(f.get(), "POINT_DATA %" PRId64 "\n", mesh.node_count());
  std::fprintf(f.get(), "SCALARS %s double 1\nLOOKUP_TABLE default\n", name.c_str());
  for (std::int64_t i = 0; i < map.size(); ++i)
    std::fprintf(f.get(), "%.9g\n", map.valid[i] ? map.value[i] : std::nan(""));
  if (std::ferror(f.get())) throw IoError("map vtk: write failed: " + path);
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  File f = open_for_write(path);
  std::fprintf(f.get(), "t_ms,v_mv\n");
  for (std::size_t i = 0; i < trace.t_ms.size(); ++i)
    std::fprintf(f.get(), "%.17g,%.17g\n", trace.t_ms[i], trace.v_mv[i]);
  if (std::ferror(f.get())) throw IoError("trace csv: write failed: " + path);
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("trace csv: cannot open " + path);
  Trace tr;
  std::string line;
  std::getline(f, line); // header
  while (std::getline(f, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    tr.t_ms.push_back(std::stod(line.substr(0, comma)));
    tr.v_mv.push_back(std::stod(line.substr(comma + 1)));
  }
  return tr;
}

void write_report_json(const RunReport& report, const std::string& path) {
  nlohmann::json j;
  j["scheme"] = report.scheme;
  j["dt_ms"] = report.dt_ms;
  j["dt_effective_ms"] = report.dt_effective_ms;
  j["dt_s_ms"] = report.dt_s_ms;
  j["dt_ad_ms"] = report.dt_ad_ms;
  j["l"] = report.l;
  j["t_end_ms"] = report.t_end_ms;
  j["n_steps"] = report.n_steps;
  j["timing_ms"] = {{"total", report.total_wall_ms},
                    {"assembly", report.assembly_ms},
                    {"reaction", report.reaction_ms},
                    {"diffusion", report.diffusion_ms},
                    {"output", report.output_ms}};
  j["k_histogram"] = report.k_histogram;
  j["workers"] = report.workers;
  j["fibrosis"] = {{"seed", report.fibrosis_seed}, {"rng", report.fibrosis_rng}};
  try {
    j["config"] = nlohmann::json::parse(report.config_echo);
  } catch (...) {
    j["config"] = report.config_echo;
  }
  std::ofstream f(path);
  if (!f) throw IoError("report: cannot open " + path);
  f << j.dump(2) << "\n";
  if (!f) throw IoError("report: write failed: " + path);
}

} // namespace cardwave
