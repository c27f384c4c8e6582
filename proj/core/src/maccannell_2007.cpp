#include "models_detail.hpp"

#include <cmath>

namespace cardwave::detail {
namespace {

// Active fibroblast membrane model (MacCannell, Bazzazi, Clark, Kondo &
// Giles 2007): time- and voltage-dependent K+ current (gates r, s), inward
// rectifier, Na+/K+ pump and background Na+ current, with fixed intra- and
// extracellular ion concentrations. Currents in pA/pF (= mV/ms at C = 1).
class MacCannell final : public CellModel {
public:
  const std::string& name() const override {
    static const std::string n = "maccannell2007";
    return n;
  }
  int state_count() const override { return 2; }
  const std::vector<std::string>& state_names() const override {
    static const std::vector<std::string> names = {"r", "s"};
    return names;
  }
  const std::vector<double>& rest_state() const override {
    // Relaxed quiescent equilibrium (20 s free run).
    static const std::vector<double> rest = {-48.865796143695611, 0.067599408770662575,
                                             0.97575886906521692};
    return rest;
  }
  double stable_step() const override { return 0.1; }

  void rates(double v, const double* s, double i_stim, double& dv, double* ds) const override {
    constexpr double Rgas = 8314.0, Temp = 306.15, Frdy = 96485.0;
    constexpr double ko = 5.4, nao = 130.0110;       // mM
    constexpr double ki = 129.4349, nai = 8.5547;    // mM, fixed
    constexpr double g_kv = 0.25;                    // nS/pF
    constexpr double g_k1 = 0.4822;                  // nS/pF
    constexpr double g_bna = 0.0095;                 // nS/pF
    constexpr double i_nak_max = 2.002;              // pA/pF
    constexpr double km_k = 1.0, km_na = 11.0;       // mM
    constexpr double v_rev = -150.0, b_denom = -200.0; // mV

    const double ek = Rgas * Temp / Frdy * std::log(ko / ki);
    const double ena = Rgas * Temp / Frdy * std::log(nao / nai);

    const double r = s[0], sg = s[1];
    const double r_inf = 1.0 / (1.0 + std::exp(-(v + 20.0) / 11.0));
    const double arg_r = (v + 20.0) / 25.9;
    const double tau_r = 20.3 + 138.0 * std::exp(-arg_r * arg_r);
    const double s_inf = 1.0 / (1.0 + std::exp((v + 23.0) / 7.0));
    const double arg_s = (v + 23.0) / 22.7;
    const double tau_s = 1574.0 + 5268.0 * std::exp(-arg_s * arg_s);

    const double i_kv = g_kv * r * sg * (v - ek);

    const double vk = v - ek;
    const double alpha_k1 = 0.1 / (1.0 + std::exp(0.06 * (vk - 200.0)));
    const double beta_k1 = (3.0 * std::exp(0.0002 * (vk + 100.0)) + std::exp(0.1 * (vk - 10.0))) /
                           (1.0 + std::exp(-0.5 * vk));
    const double i_k1 = g_k1 * alpha_k1 / (alpha_k1 + beta_k1) * vk;

    const double na15 = std::pow(nai, 1.5);
    const double i_nak = i_nak_max * ko / (ko + km_k) * na15 / (na15 + std::pow(km_na, 1.5)) *
                         (v - v_rev) / (v - b_denom);

    const double i_bna = g_bna * (v - ena);

    dv = -(i_kv + i_k1 + i_nak + i_bna) + i_stim;
    ds[0] = (r_inf - r) / tau_r;
    ds[1] = (s_inf - sg) / tau_s;
  }
};

} // namespace

std::shared_ptr<const CellModel> make_maccannell() {
  static const auto model = std::make_shared<const MacCannell>();
  return model;
}

} // namespace cardwave::detail
