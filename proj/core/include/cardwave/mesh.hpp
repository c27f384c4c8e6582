#ifndef CARDWAVE_MESH_HPP
#define CARDWAVE_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cardwave {

/// Well-known tissue tags. Meshes may define further tags; these four cover
/// the shipped experiments.
namespace tags {
inline constexpr const char* myocyte_epi = "myocyte-epi";
inline constexpr const char* myocyte_mid = "myocyte-mid";
inline constexpr const char* myocyte_endo = "myocyte-endo";
inline constexpr const char* fibroblast = "fibroblast";
} // namespace tags

/// Regular 2D quadrilateral mesh. Immutable after construction; cheap to
/// share read-only across workers.
///
/// Node numbering is row-major, y outer / x inner, so node (ix, iy) on a
/// regular sheet has index iy*(nx+1) + ix. Elements are counterclockwise.
struct Mesh {
  std::vector<std::array<double, 2>> node_coords;       // cm
  std::vector<std::array<std::int64_t, 4>> elements;    // CCW node indices
  double spacing_h = 0.0;                               // cm
  std::vector<std::string> tag_names;                   // tag id -> label
  std::vector<std::int32_t> node_tags;                  // per node, index into tag_names
  std::vector<std::array<double, 2>> element_fibers;    // unit vectors

  std::int64_t node_count() const { return static_cast<std::int64_t>(node_coords.size()); }
  std::int64_t element_count() const { return static_cast<std::int64_t>(elements.size()); }

  /// Tag id for a label, adding it to the registry if new.
  std::int32_t tag_id(const std::string& label);
  /// Tag id for a label, or -1 when the mesh has no such tag.
  std::int32_t find_tag(const std::string& label) const;
  const std::string& tag_of_node(std::int64_t node) const { return tag_names[node_tags[node]]; }

  /// Index of the node closest to (x, y); ties broken by lowest index.
  std::int64_t nearest_node(double x, double y) const;

  /// Bounding box {xmin, xmax, ymin, ymax}.
  std::array<double, 4> bounding_box() const;
};

/// Deterministic node-region selection.
struct RegionSelector {
  enum class Kind {
    half_plane_x_le, ///< x <= value
    half_plane_x_ge, ///< x >= value
    half_plane_y_le, ///< y <= value
    half_plane_y_ge, ///< y >= value
    rectangle,       ///< [x0,x1] x [y0,y1], inclusive
    node_set,        ///< explicit indices
    disc,            ///< distance to (cx, cy) <= radius
  };
  Kind kind = Kind::rectangle;
  double value = 0.0;                 // half-plane threshold (cm)
  double x0 = 0.0, x1 = 0.0;          // rectangle bounds (cm)
  double y0 = 0.0, y1 = 0.0;
  double cx = 0.0, cy = 0.0, radius = 0.0; // disc (cm)
  std::vector<std::int64_t> nodes;    // node_set payload
};

/// Build a regular Lx x Ly sheet with spacing h. Every node is tagged
/// myocyte-epi and every element fiber is (cos(angle), sin(angle)).
/// Lx and Ly must be exact multiples of h within 1e-9 relative.
Mesh build_regular_sheet(double lx_cm, double ly_cm, double h_cm, double fiber_angle_rad);

/// Retag round(fraction * node_count) nodes as fibroblast, chosen by a
/// seeded Fisher-Yates draw over all node indices (generator: mt19937_64,
/// index selection by modulo; the algorithm name is echoed into run
/// metadata). Pure: returns a new mesh.
Mesh assign_fibrosis(const Mesh& mesh, double fraction, std::uint64_t seed);

/// Name of the fibrosis sampling algorithm, recorded in run metadata.
inline constexpr const char* fibrosis_rng_name = "fisher-yates/mt19937_64/modulo";

/// Deterministic sorted node-index set for a selector. Geometric comparisons
/// use an inclusive 1e-9 cm tolerance so grid nodes on a region boundary are
/// selected regardless of rounding in coordinate arithmetic.
std::vector<std::int64_t> select_nodes(const Mesh& mesh, const RegionSelector& sel);

/// Text-format mesh export/import for test fixtures. The format is described
/// in docs/file_formats.md.
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

} // namespace cardwave

#endif
