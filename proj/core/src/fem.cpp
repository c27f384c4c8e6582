#include "cardwave/fem.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cardwave {

double AssembledOperator::entry(std::int64_t i, std::int64_t j) const {
  for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
    if (col[p] == j) return val[p];
  return 0.0;
}

DiffusionField build_diffusion_field(const Mesh& mesh, double d0_myocyte, double d0_fibrotic,
                                     double rho) {
  if (!(d0_myocyte > 0.0) || !(d0_fibrotic > 0.0))
    throw ValidationError("diffusion: coefficients must be positive");
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("diffusion: rho must lie in (0, 1]");

  const std::int32_t fib = mesh.find_tag(tags::fibroblast);
  DiffusionField field;
  const std::int64_t ne = mesh.element_count();
  field.dxx.resize(ne);
  field.dxy.resize(ne);
  field.dyy.resize(ne);
  field.d_long.resize(ne);
  for (std::int64_t e = 0; e < ne; ++e) {
    bool fibrotic = false;
    if (fib >= 0)
      for (int a = 0; a < 4; ++a)
        if (mesh.node_tags[mesh.elements[e][a]] == fib) fibrotic = true;
    const double dl = fibrotic ? d0_fibrotic : d0_myocyte;
    const double dt = rho * dl;
    const double fx = mesh.element_fibers[e][0];
    const double fy = mesh.element_fibers[e][1];
    // D = dl f f^T + dt (I - f f^T)
    field.dxx[e] = dl * fx * fx + dt * (1.0 - fx * fx);
    field.dxy[e] = (dl - dt) * fx * fy;
    field.dyy[e] = dl * fy * fy + dt * (1.0 - fy * fy);
    field.d_long[e] = dl;
  }
  return field;
}

namespace {

// 2x2 Gauss points on the bilinear reference square [-1,1]^2.
constexpr double kGauss = 0.57735026918962576; // 1/sqrt(3)

struct ElementMatrices {
  double k[4][4];
  double m[4]; // row-sum lumped contribution
};

ElementMatrices element_integrals(const Mesh& mesh, const DiffusionField& field, std::int64_t e) {
  ElementMatrices out{};
  double xs[4], ys[4];
  for (int a = 0; a < 4; ++a) {
    xs[a] = mesh.node_coords[mesh.elements[e][a]][0];
    ys[a] = mesh.node_coords[mesh.elements[e][a]][1];
  }
  const double gp[2] = {-kGauss, kGauss};
  for (double xi : gp) {
    for (double eta : gp) {
      // bilinear shape functions and reference-space gradients
      const double n[4] = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                           0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
      const double dnxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta),
                              -0.25 * (1 + eta)};
      const double dneta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi),
                               0.25 * (1 - xi)};
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 4; ++a) {
        j00 += dnxi[a] * xs[a];
        j01 += dnxi[a] * ys[a];
        j10 += dneta[a] * xs[a];
        j11 += dneta[a] * ys[a];
      }
      const double det = j00 * j11 - j01 * j10;
      if (!(det > 0.0))
        throw ValidationError("assemble: element " + std::to_string(e) +
                              " has non-positive Jacobian (degenerate or clockwise)");
      const double inv00 = j11 / det, inv01 = -j01 / det;
      const double inv10 = -j10 / det, inv11 = j00 / det;
      double gx[4], gy[4];
      for (int a = 0; a < 4; ++a) {
        gx[a] = inv00 * dnxi[a] + inv01 * dneta[a];
        gy[a] = inv10 * dnxi[a] + inv11 * dneta[a];
      }
      const double dxx = field.dxx[e], dxy = field.dxy[e], dyy = field.dyy[e];
      for (int a = 0; a < 4; ++a) {
        const double dgx = dxx * gx[a] + dxy * gy[a];
        const double dgy = dxy * gx[a] + dyy * gy[a];
        for (int b = 0; b < 4; ++b) out.k[a][b] += det * (dgx * gx[b] + dgy * gy[b]);
        out.m[a] += det * n[a]; // row sum of the consistent mass: int N_a * 1
      }
    }
  }
  return out;
}

} // namespace

AssembledOperator assemble(const Mesh& mesh, const DiffusionField& field) {
  if (field.element_count() != mesh.element_count())
    throw ValidationError("assemble: field not defined on every element");
  const std::int64_t n = mesh.node_count();

  // Triplet assembly, then CSR compression with ascending columns.
  struct Triplet {
    std::int64_t i, j;
    double v;
  };
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.element_count()) * 16);
  std::vector<double> mass(static_cast<std::size_t>(n), 0.0);

  for (std::int64_t e = 0; e < mesh.element_count(); ++e) {
    const ElementMatrices em = element_integrals(mesh, field, e);
    for (int a = 0; a < 4; ++a) {
      const std::int64_t ia = mesh.elements[e][a];
      mass[ia] += em.m[a];
      for (int b = 0; b < 4; ++b) trip.push_back({ia, mesh.elements[e][b], em.k[a][b]});
    }
  }

  std::sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  AssembledOperator op;
  op.lumped_mass = std::move(mass);
  op.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t t = 0; t < trip.size();) {
    std::size_t u = t + 1;
    double sum = trip[t].v;
    while (u < trip.size() && trip[u].i == trip[t].i && trip[u].j == trip[t].j)
      sum += trip[u++].v;
    op.col.push_back(trip[t].j);
    op.val.push_back(sum);
    ++op.row_ptr[trip[t].i + 1];
    t = u;
  }
  for (std::int64_t i = 0; i < n; ++i) op.row_ptr[i + 1] += op.row_ptr[i];

  // Structural checks: m > 0, zero row sums (pure Neumann null space),
  // symmetry within 1e-12 relative.
  double max_abs = 0.0;
  for (double v : op.val) max_abs = std::max(max_abs, std::abs(v));
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(op.lumped_mass[i] > 0.0))
      throw ValidationError("assemble: non-positive lumped mass at node " + std::to_string(i));
    double row_sum = 0.0;
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p) {
      row_sum += op.val[p];
      const double vt = op.entry(op.col[p], i);
      if (std::abs(op.val[p] - vt) > 1e-12 * std::max(1.0, max_abs))
        throw ValidationError("assemble: stiffness not symmetric at (" + std::to_string(i) +
                              ", " + std::to_string(op.col[p]) + ")");
    }
    if (std::abs(row_sum) > 1e-10 * std::max(1e-300, max_abs))
      throw ValidationError("assemble: row " + std::to_string(i) + " sum " +
                            std::to_string(row_sum) + " not zero");
  }

  op.dt_s = gershgorin_step(op);
  return op;
}

double gershgorin_step(const AssembledOperator& op) {
  const std::int64_t n = op.rows();
  if (n == 0) throw ValidationError("gershgorin: empty operator");
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i) {
    double den = 0.0;
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p)
      den += op.col[p] == i ? op.val[p] : std::abs(op.val[p]);
    if (!(den > 0.0))
      throw ValidationError("gershgorin: row " + std::to_string(i) +
                            " has non-positive k_ii + sum|k_ij|; operator is not diffusive");
    min_ratio = std::min(min_ratio, op.lumped_mass[i] / den);
  }
  return 0.9 * min_ratio;
}

void diffusion_substep(const AssembledOperator& op, const std::vector<double>& v, double dt_sub,
                       std::vector<double>& out) {
  const std::int64_t n = op.rows();
  out.resize(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p)
      acc += op.val[p] * v[op.col[p]];
    out[i] = v[i] - dt_sub / op.lumped_mass[i] * acc;
  }
}

void dump_operator(const AssembledOperator& op, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("operator dump: cannot open " + path);
  f.precision(17);
  for (std::int64_t i = 0; i < op.rows(); ++i)
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p)
      f << i << " " << op.col[p] << " " << op.val[p] << "\n";
  if (!f) throw IoError("operator dump: write failed: " + path);
}

} // namespace cardwave
