#ifndef CARDWAVE_FEM_HPP
#define CARDWAVE_FEM_HPP

#include "cardwave/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cardwave {

/// Per-element anisotropic diffusion tensor D = d_l f f^T + d_t (I - f f^T),
/// stored as the symmetric 2x2 (dxx, dxy, dyy) in cm^2/ms.
struct DiffusionField {
  std::vector<double> dxx, dxy, dyy;
  std::vector<double> d_long; // element d_l, kept for reporting

  std::int64_t element_count() const { return static_cast<std::int64_t>(dxx.size()); }
};

/// Assembled diffusion operator: CSR stiffness K (k_ij = int grad phi_i . D grad phi_j),
/// row-sum lumped mass vector m, and the Gershgorin stable step dt_s.
struct AssembledOperator {
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int64_t> col;
  std::vector<double> val;
  std::vector<double> lumped_mass; // m_i > 0
  double dt_s = 0.0;               // ms

  std::int64_t rows() const { return static_cast<std::int64_t>(lumped_mass.size()); }
  double entry(std::int64_t i, std::int64_t j) const; // 0 when absent
};

/// Element diffusion tensors from node tags. An element is treated as
/// fibrotic, using d0_fibrotic, when any of its nodes is tagged fibroblast;
/// this realizes reduced myocyte-fibroblast interaction coupling at the
/// element level. d_t = rho * d_l.
DiffusionField build_diffusion_field(const Mesh& mesh, double d0_myocyte, double d0_fibrotic,
                                     double rho);

/// Assemble K and m with 4-node bilinear isoparametric elements and 2x2
/// Gauss quadrature; the mass is lumped by row sum. Asserts K symmetry,
/// zero row sums and m > 0, and populates dt_s via gershgorin_step.
/// Degenerate (non-positive Jacobian) elements are rejected.
AssembledOperator assemble(const Mesh& mesh, const DiffusionField& field);

/// Stable explicit diffusion step
///   dt_s = 0.9 * min_i [ m_i / (k_ii + sum_{j != i} |k_ij|) ].
/// Rows with a non-positive denominator are rejected.
double gershgorin_step(const AssembledOperator& op);

/// One forward-Euler diffusion sub-step:
///   out_i = v_i - (dt_sub / m_i) * sum_j k_ij v_j.
/// Row sums are evaluated in fixed (ascending column) order, so the result
/// is bit-identical for any worker count. `out` must not alias `v`.
void diffusion_substep(const AssembledOperator& op, const std::vector<double>& v, double dt_sub,
                       std::vector<double>& out);

/// Coordinate-format text dump "i j value" (one entry per line) for
/// cross-checks against an independent assembler.
void dump_operator(const AssembledOperator& op, const std::string& path);

} // namespace cardwave

#endif
