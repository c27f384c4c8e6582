#ifndef CARDWAVE_TEST_ORACLES_HPP
#define CARDWAVE_TEST_ORACLES_HPP

#include "cardwave/fem.hpp"
#include "cardwave/mesh.hpp"
#include "cardwave/splitting.hpp"

#include <cstdint>
#include <vector>

// Independent verification oracles. Everything here is free of the
// production decision logic it checks: the eigenvalue estimate does not call
// gershgorin_step, and the exact propagators below never touch the Strang
// drivers.
namespace cardwave::oracles {

struct SpectralBound {
  double lambda_max = 0.0;    // of diag(m)^-1 K
  double critical_step = 0.0; // 2 / lambda_max
  int iterations = 0;
};

/// Power iteration on diag(m)^-1 K to 1e-6 relative tolerance; rejected when
/// it fails to converge within 1e5 iterations.
SpectralBound spectral_bound(const AssembledOperator& op);

/// Separable cosine-mode problem u_t = -a u + d laplace(u) with zero-flux
/// boundaries on an Lx x Ly sheet: u(x,y,t) = exp(-(a + d lambda) t) u0 with
/// u0 = cos(px pi x / Lx) cos(py pi y / Ly).
struct LinearTestProblem {
  double decay_per_ms = 0.05;
  double diffusion = 0.001; // cm^2/ms, isotropic
  double lx_cm = 0.5, ly_cm = 0.5;
  double h_cm = 0.05;
  int px = 1, py = 1;

  Mesh make_mesh() const;
  AssembledOperator make_operator(const Mesh& mesh) const;
  std::vector<double> initial_field(const Mesh& mesh) const;
  double continuous_eigenvalue() const; // d * lambda
  std::vector<double> analytic_solution(const Mesh& mesh, double t_ms) const;
};

/// Exact semi-discrete diffusion propagator u(t) = exp(-t M^-1 K) u0 via a
/// dense symmetric eigendecomposition (small meshes only).
class ExactDiffusion {
public:
  explicit ExactDiffusion(const AssembledOperator& op); // rejects n > 1024
  std::vector<double> apply(const std::vector<double>& u0, double t_ms) const;

private:
  std::int64_t n_;
  std::vector<double> sqrt_m_, eigval_, eigvec_; // eigvec column-major
};

/// Strang composition with per-node decay rates (optionally non-commuting
/// with diffusion) and either exact or forward-Euler sub-integrators.
/// The step structure mirrors the production driver: opening half-interval
/// diffusion, full-interval reaction, merged full-interval diffusion,
/// closing half-interval diffusion.
std::vector<double> strang_linear_run(const AssembledOperator& op, const ExactDiffusion& exact,
                                      const std::vector<double>& decay_per_node,
                                      std::vector<double> u, double t_end_ms, double dt_ms,
                                      bool euler_substeps);

/// Fine-step reference: OST forward Euler at dt = min(dt0/10, 5 dt_s/10)
/// on a prepared problem (<= 1e4 nodes).
SimulationResult reference_solution(const AssembledOperator& op,
                                    const std::vector<std::shared_ptr<const CellModel>>& models,
                                    NodeStateArray state, const ProtocolIndex* protocol,
                                    const std::vector<Probe>& probes, double t_end_ms,
                                    double record_interval_ms);

/// Least-squares slope of log(error) against log(dt): the observed
/// convergence order.
double observed_order(const std::vector<double>& dts, const std::vector<double>& errors);

} // namespace cardwave::oracles

#endif
