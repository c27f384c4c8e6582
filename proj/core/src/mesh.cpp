#include "cardwave/mesh.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace cardwave {

namespace {
constexpr double kGeomTol = 1e-9; // cm, inclusive boundary tolerance

// Round Lx/h to the nearest integer, rejecting non-divisible dimensions.
std::int64_t cells_along(double length, double h, const char* axis) {
  const double q = length / h;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
    throw ValidationError(std::string("mesh: ") + axis + " extent " +
                          std::to_string(length) + " cm is not a positive multiple of h = " +
                          std::to_string(h) + " cm");
  }
  return static_cast<std::int64_t>(r);
}
} // namespace

std::int32_t Mesh::tag_id(const std::string& label) {
  for (std::size_t i = 0; i < tag_names.size(); ++i)
    if (tag_names[i] == label) return static_cast<std::int32_t>(i);
  tag_names.push_back(label);
  return static_cast<std::int32_t>(tag_names.size() - 1);
}

std::int32_t Mesh::find_tag(const std::string& label) const {
  for (std::size_t i = 0; i < tag_names.size(); ++i)
    if (tag_names[i] == label) return static_cast<std::int32_t>(i);
  return -1;
}

std::int64_t Mesh::nearest_node(double x, double y) const {
  std::int64_t best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < node_count(); ++i) {
    const double dx = node_coords[i][0] - x;
    const double dy = node_coords[i][1] - y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

std::array<double, 4> Mesh::bounding_box() const {
  std::array<double, 4> bb = {std::numeric_limits<double>::infinity(),
                              -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity(),
                              -std::numeric_limits<double>::infinity()};
  for (const auto& p : node_coords) {
    bb[0] = std::min(bb[0], p[0]);
    bb[1] = std::max(bb[1], p[0]);
    bb[2] = std::min(bb[2], p[1]);
    bb[3] = std::max(bb[3], p[1]);
  }
  return bb;
}

Mesh build_regular_sheet(double lx_cm, double ly_cm, double h_cm, double fiber_angle_rad) {
  if (!(h_cm > 0.0) || !std::isfinite(h_cm))
    throw ValidationError("mesh: spacing h must be positive and finite");
  const std::int64_t nx = cells_along(lx_cm, h_cm, "x");
  const std::int64_t ny = cells_along(ly_cm, h_cm, "y");
  const std::int64_t w = nx + 1;

  Mesh m;
  m.spacing_h = h_cm;
  m.node_coords.reserve(static_cast<std::size_t>(w * (ny + 1)));
  for (std::int64_t iy = 0; iy <= ny; ++iy)
    for (std::int64_t ix = 0; ix <= nx; ++ix)
      m.node_coords.push_back({static_cast<double>(ix) * h_cm, static_cast<double>(iy) * h_cm});

  m.elements.reserve(static_cast<std::size_t>(nx * ny));
  for (std::int64_t iy = 0; iy < ny; ++iy)
    for (std::int64_t ix = 0; ix < nx; ++ix) {
      const std::int64_t n0 = iy * w + ix;
      m.elements.push_back({n0, n0 + 1, n0 + 1 + w, n0 + w});
    }

  const std::int32_t epi = m.tag_id(tags::myocyte_epi);
  m.node_tags.assign(m.node_coords.size(), epi);
  const std::array<double, 2> f = {std::cos(fiber_angle_rad), std::sin(fiber_angle_rad)};
  m.element_fibers.assign(m.elements.size(), f);
  return m;
}

Mesh assign_fibrosis(const Mesh& mesh, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw ValidationError("fibrosis: fraction must lie in [0, 1]");
  Mesh out = mesh;
  const std::int64_t n = out.node_count();
  const std::int64_t n_sel = static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_sel == 0) return out;

  // Hand-rolled Fisher-Yates so the drawn set depends only on mt19937_64
  // output, not on a standard library's shuffle/distribution internals.
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 gen(seed);
  for (std::int64_t i = n - 1; i > 0; --i) {
    const std::uint64_t j = gen() % static_cast<std::uint64_t>(i + 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }

  const std::int32_t fib = out.tag_id(tags::fibroblast);
  for (std::int64_t k = 0; k < n_sel; ++k)
    out.node_tags[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = fib;
  return out;
}

std::vector<std::int64_t> select_nodes(const Mesh& mesh, const RegionSelector& sel) {
  using Kind = RegionSelector::Kind;
  auto finite = [](double v) { return std::isfinite(v); };
  switch (sel.kind) {
    case Kind::half_plane_x_le:
    case Kind::half_plane_x_ge:
    case Kind::half_plane_y_le:
    case Kind::half_plane_y_ge:
      if (!finite(sel.value)) throw ValidationError("selector: half-plane threshold must be finite");
      break;
    case Kind::rectangle:
      if (!finite(sel.x0) || !finite(sel.x1) || !finite(sel.y0) || !finite(sel.y1))
        throw ValidationError("selector: rectangle bounds must be finite");
      break;
    case Kind::disc:
      if (!finite(sel.cx) || !finite(sel.cy) || !(sel.radius >= 0.0))
        throw ValidationError("selector: disc requires finite center and radius >= 0");
      break;
    case Kind::node_set:
      for (auto i : sel.nodes)
        if (i < 0 || i >= mesh.node_count())
          throw ValidationError("selector: node index " + std::to_string(i) + " out of range");
      break;
  }

  std::vector<std::int64_t> out;
  if (sel.kind == Kind::node_set) {
    out = sel.nodes;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  for (std::int64_t i = 0; i < mesh.node_count(); ++i) {
    const double x = mesh.node_coords[i][0];
    const double y = mesh.node_coords[i][1];
    bool in = false;
    switch (sel.kind) {
      case Kind::half_plane_x_le: in = x <= sel.value + kGeomTol; break;
      case Kind::half_plane_x_ge: in = x >= sel.value - kGeomTol; break;
      case Kind::half_plane_y_le: in = y <= sel.value + kGeomTol; break;
      case Kind::half_plane_y_ge: in = y >= sel.value - kGeomTol; break;
      case Kind::rectangle:
        in = x >= sel.x0 - kGeomTol && x <= sel.x1 + kGeomTol &&
             y >= sel.y0 - kGeomTol && y <= sel.y1 + kGeomTol;
        break;
      case Kind::disc: {
        const double dx = x - sel.cx, dy = y - sel.cy;
        in = std::sqrt(dx * dx + dy * dy) <= sel.radius + kGeomTol;
        break;
      }
      case Kind::node_set: break; // handled above
    }
    if (in) out.push_back(i);
  }
  return out;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("mesh: cannot open for write: " + path);
  f.precision(17);
  f << "cardwave-mesh 1\n";
  f << "spacing " << mesh.spacing_h << "\n";
  f << "tags " << mesh.tag_names.size() << "\n";
  for (const auto& t : mesh.tag_names) f << t << "\n";
  f << "nodes " << mesh.node_count() << "\n";
  for (std::int64_t i = 0; i < mesh.node_count(); ++i)
    f << mesh.node_coords[i][0] << " " << mesh.node_coords[i][1] << " " << mesh.node_tags[i] << "\n";
  f << "elements " << mesh.element_count() << "\n";
  for (std::int64_t e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    const auto& fb = mesh.element_fibers[e];
    f << el[0] << " " << el[1] << " " << el[2] << " " << el[3] << " " << fb[0] << " " << fb[1] << "\n";
  }
  if (!f) throw IoError("mesh: write failed: " + path);
}

Mesh read_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("mesh: cannot open for read: " + path);
  std::string magic;
  int version = 0;
  f >> magic >> version;
  if (magic != "cardwave-mesh" || version != 1)
    throw IoError("mesh: not a cardwave-mesh v1 file: " + path);
  Mesh m;
  std::string key;
  std::size_t count = 0;
  f >> key >> m.spacing_h;
  if (key != "spacing") throw IoError("mesh: expected 'spacing' in " + path);
  f >> key >> count;
  if (key != "tags") throw IoError("mesh: expected 'tags' in " + path);
  f.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  m.tag_names.resize(count);
  for (auto& t : m.tag_names) std::getline(f, t);
  f >> key >> count;
  if (key != "nodes") throw IoError("mesh: expected 'nodes' in " + path);
  m.node_coords.resize(count);
  m.node_tags.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    f >> m.node_coords[i][0] >> m.node_coords[i][1] >> m.node_tags[i];
  f >> key >> count;
  if (key != "elements") throw IoError("mesh: expected 'elements' in " + path);
  m.elements.resize(count);
  m.element_fibers.resize(count);
  for (std::size_t e = 0; e < count; ++e)
    f >> m.elements[e][0] >> m.elements[e][1] >> m.elements[e][2] >> m.elements[e][3] >>
        m.element_fibers[e][0] >> m.element_fibers[e][1];
  if (!f) throw IoError("mesh: truncated file: " + path);
  return m;
}

} // namespace cardwave
