#include "models_detail.hpp"

namespace cardwave::detail {
namespace {

// Two-variable excitable model (Aliev & Panfilov 1996) with the customary
// physical mapping V = 100*u - 80 mV and t = 12.9 ms per model time unit.
// Non-stiff; used for fast tests and analytically checkable cases.
class AlievPanfilov final : public CellModel {
public:
  const std::string& name() const override {
    static const std::string n = "aliev-panfilov";
    return n;
  }
  int state_count() const override { return 1; }
  const std::vector<std::string>& state_names() const override {
    static const std::vector<std::string> names = {"w"};
    return names;
  }
  const std::vector<double>& rest_state() const override {
    // u = 0, w = 0 is an exact equilibrium.
    static const std::vector<double> rest = {-80.0, 0.0};
    return rest;
  }
  double stable_step() const override { return 1.0; }
  double rest_rate_tolerance() const override { return 1e-12; }

  void rates(double v, const double* s, double i_stim, double& dv, double* ds) const override {
    constexpr double k = 8.0, a = 0.15, eps0 = 0.002, mu1 = 0.2, mu2 = 0.3;
    constexpr double v_rest = -80.0, v_amp = 100.0, t_scale = 12.9; // mV, mV, ms
    const double u = (v - v_rest) / v_amp;
    const double w = s[0];
    const double du = -k * u * (u - a) * (u - 1.0) - u * w;
    const double eps = eps0 + mu1 * w / (u + mu2);
    const double dw = eps * (-w - k * u * (u - a - 1.0));
    dv = v_amp / t_scale * du + i_stim;
    ds[0] = dw / t_scale;
  }
};

} // namespace

std::shared_ptr<const CellModel> make_aliev_panfilov() {
  static const auto model = std::make_shared<const AlievPanfilov>();
  return model;
}

} // namespace cardwave::detail
