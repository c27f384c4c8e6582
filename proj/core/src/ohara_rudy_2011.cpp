#include "models_detail.hpp"

#include <cmath>

namespace cardwave::detail {
namespace {

// Human ventricular action potential model (O'Hara, Virag, Varro & Rudy 2011)
// with the endocardial / epicardial / midmyocardial conductance variants.
// Equations and constants follow the authors' published reference code.
// 40 state variables plus V; gating variables are exposed as plain
// derivatives (x_inf - x)/tau_x so the caller integrates everything with
// forward Euler.
//
// Units: V in mV, t in ms, concentrations in mM, currents in uA/uF (= mV/ms
// with C = 1 uF/cm^2).

enum StateIndex {
  S_nai, S_nass, S_ki, S_kss, S_cai, S_cass, S_cansr, S_cajsr,
  S_m, S_hf, S_hs, S_j, S_hsp, S_jp, S_mL, S_hL, S_hLp,
  S_a, S_iF, S_iS, S_ap, S_iFp, S_iSp,
  S_d, S_ff, S_fs, S_fcaf, S_fcas, S_jca, S_nca, S_ffp, S_fcafp,
  S_xrf, S_xrs, S_xs1, S_xs2, S_xk1,
  S_Jrelnp, S_Jrelp, S_CaMKt,
  kStateCount
};

const std::vector<std::string> kStateNames = {
    "nai", "nass", "ki", "kss", "cai", "cass", "cansr", "cajsr",
    "m", "hf", "hs", "j", "hsp", "jp", "mL", "hL", "hLp",
    "a", "iF", "iS", "ap", "iFp", "iSp",
    "d", "ff", "fs", "fcaf", "fcas", "jca", "nca", "ffp", "fcafp",
    "xrf", "xrs", "xs1", "xs2", "xk1",
    "Jrelnp", "Jrelp", "CaMKt"};

// extracellular concentrations (mM)
constexpr double nao = 140.0;
constexpr double cao = 1.8;
constexpr double ko = 5.4;

// buffers
constexpr double BSRmax = 0.047, KmBSR = 0.00087;
constexpr double BSLmax = 1.124, KmBSL = 0.0087;
constexpr double cmdnmax_base = 0.05, kmcmdn = 0.00238;
constexpr double trpnmax = 0.07, kmtrpn = 0.0005;
constexpr double csqnmax = 10.0, kmcsqn = 0.8;

// CaMK
constexpr double aCaMK = 0.05, bCaMK = 0.00068, CaMKo = 0.05;
constexpr double KmCaM = 0.0015, KmCaMK = 0.15;

// physical constants
constexpr double Rgas = 8314.0, Temp = 310.0, Frdy = 96485.0;

// cell geometry (as in the reference code, including the rounded pi)
constexpr double pi_geom = 3.14;
constexpr double cell_L = 0.01, cell_rad = 0.0011;
constexpr double vcell = 1000.0 * pi_geom * cell_rad * cell_rad * cell_L;
constexpr double Ageo = 2.0 * pi_geom * cell_rad * cell_rad + 2.0 * pi_geom * cell_rad * cell_L;
constexpr double Acap = 2.0 * Ageo;
constexpr double vmyo = 0.68 * vcell;
constexpr double vnsr = 0.0552 * vcell;
constexpr double vjsr = 0.0048 * vcell;
constexpr double vss = 0.02 * vcell;

// x / (exp(x) - 1), stable near x = 0
inline double x_over_expm1(double x) {
  if (std::abs(x) < 1e-8) return 1.0 / (1.0 + 0.5 * x);
  return x / std::expm1(x);
}

class OharaRudy final : public CellModel {
public:
  explicit OharaRudy(int celltype, std::string model_name, std::vector<double> rest)
      : celltype_(celltype), name_(std::move(model_name)), rest_(std::move(rest)) {}

  const std::string& name() const override { return name_; }
  int state_count() const override { return kStateCount; }
  const std::vector<std::string>& state_names() const override { return kStateNames; }
  const std::vector<double>& rest_state() const override { return rest_; }
  double stable_step() const override { return 0.01; }
  // The quiescent equilibrium has a slow residual drift from the Na/K fluxes.
  double rest_rate_tolerance() const override { return 1e-3; }

  void rates(double v, const double* s, double i_stim, double& dv, double* ds) const override {
    const bool epi = celltype_ == 1;
    const bool mid = celltype_ == 2;

    const double nai = s[S_nai], nass = s[S_nass], ki = s[S_ki], kss = s[S_kss];
    const double cai = s[S_cai], cass = s[S_cass], cansr = s[S_cansr], cajsr = s[S_cajsr];

    const double ENa = Rgas * Temp / Frdy * std::log(nao / nai);
    const double EK = Rgas * Temp / Frdy * std::log(ko / ki);
    const double EKs = Rgas * Temp / Frdy * std::log((ko + 0.01833 * nao) / (ki + 0.01833 * nai));

    const double CaMKb = CaMKo * (1.0 - s[S_CaMKt]) / (1.0 + KmCaM / cass);
    const double CaMKa = CaMKb + s[S_CaMKt];
    const double fCaMK = 1.0 / (1.0 + KmCaMK / CaMKa);

    const double vfrt = v * Frdy / (Rgas * Temp);

    // ---- INa (fast)
    const double mss = 1.0 / (1.0 + std::exp(-(v + 39.57) / 9.871));
    const double tm =
        1.0 / (6.765 * std::exp((v + 11.64) / 34.77) + 8.552 * std::exp(-(v + 77.42) / 5.955));
    const double hss = 1.0 / (1.0 + std::exp((v + 82.90) / 6.086));
    const double thf = 1.0 / (1.432e-5 * std::exp(-(v + 1.196) / 6.285) +
                              6.149 * std::exp((v + 0.5096) / 20.27));
    const double ths = 1.0 / (0.009794 * std::exp(-(v + 17.95) / 28.05) +
                              0.3343 * std::exp((v + 5.730) / 56.66));
    constexpr double Ahf = 0.99, Ahs = 1.0 - 0.99;
    const double h = Ahf * s[S_hf] + Ahs * s[S_hs];
    const double jss = hss;
    const double tj = 2.038 + 1.0 / (0.02136 * std::exp(-(v + 100.6) / 8.281) +
                                     0.3052 * std::exp((v + 0.9941) / 38.45));
    const double hssp = 1.0 / (1.0 + std::exp((v + 89.1) / 6.086));
    const double thsp = 3.0 * ths;
    const double hp = Ahf * s[S_hf] + Ahs * s[S_hsp];
    const double tjp = 1.46 * tj;
    const double GNa = 75.0;
    const double m3 = s[S_m] * s[S_m] * s[S_m];
    const double INa =
        GNa * (v - ENa) * m3 * ((1.0 - fCaMK) * h * s[S_j] + fCaMK * hp * s[S_jp]);

    // ---- INaL (late)
    const double mLss = 1.0 / (1.0 + std::exp(-(v + 42.85) / 5.264));
    const double tmL = tm;
    const double hLss = 1.0 / (1.0 + std::exp((v + 87.61) / 7.488));
    const double thL = 200.0;
    const double hLssp = 1.0 / (1.0 + std::exp((v + 93.81) / 7.488));
    const double thLp = 3.0 * thL;
    double GNaL = 0.0075;
    if (epi) GNaL *= 0.6;
    const double INaL =
        GNaL * (v - ENa) * s[S_mL] * ((1.0 - fCaMK) * s[S_hL] + fCaMK * s[S_hLp]);

    // ---- Ito (transient outward)
    const double ass = 1.0 / (1.0 + std::exp(-(v - 14.34) / 14.82));
    const double ta = 1.0515 / (1.0 / (1.2089 * (1.0 + std::exp(-(v - 18.4099) / 29.3814))) +
                                3.5 / (1.0 + std::exp((v + 100.0) / 29.3814)));
    const double iss = 1.0 / (1.0 + std::exp((v + 43.94) / 5.711));
    const double delta_epi = epi ? 1.0 - 0.95 / (1.0 + std::exp((v + 70.0) / 5.0)) : 1.0;
    double tiF = 4.562 + 1.0 / (0.3933 * std::exp(-(v + 100.0) / 100.0) +
                                0.08004 * std::exp((v + 50.0) / 16.59));
    double tiS = 23.62 + 1.0 / (0.001416 * std::exp(-(v + 96.52) / 59.05) +
                                1.780e-8 * std::exp((v + 114.1) / 8.079));
    tiF *= delta_epi;
    tiS *= delta_epi;
    const double AiF = 1.0 / (1.0 + std::exp((v - 213.6) / 151.2));
    const double AiS = 1.0 - AiF;
    const double ito_i = AiF * s[S_iF] + AiS * s[S_iS];
    const double assp = 1.0 / (1.0 + std::exp(-(v - 24.34) / 14.82));
    const double dti_develop =
        1.354 + 1.0e-4 / (std::exp((v - 167.4) / 15.89) + std::exp(-(v - 12.23) / 0.2154));
    const double dti_recover = 1.0 - 0.5 / (1.0 + std::exp((v + 70.0) / 20.0));
    const double tiFp = dti_develop * dti_recover * tiF;
    const double tiSp = dti_develop * dti_recover * tiS;
    const double ito_ip = AiF * s[S_iFp] + AiS * s[S_iSp];
    double Gto = 0.02;
    if (epi || mid) Gto *= 4.0;
    const double Ito =
        Gto * (v - EK) * ((1.0 - fCaMK) * s[S_a] * ito_i + fCaMK * s[S_ap] * ito_ip);

    // ---- ICaL / ICaNa / ICaK
    const double dss = 1.0 / (1.0 + std::exp(-(v + 3.940) / 4.230));
    const double td = 0.6 + 1.0 / (std::exp(-0.05 * (v + 6.0)) + std::exp(0.09 * (v + 14.0)));
    const double fss = 1.0 / (1.0 + std::exp((v + 19.58) / 3.696));
    const double tff = 7.0 + 1.0 / (0.0045 * std::exp(-(v + 20.0) / 10.0) +
                                    0.0045 * std::exp((v + 20.0) / 10.0));
    const double tfs = 1000.0 + 1.0 / (0.000035 * std::exp(-(v + 5.0) / 4.0) +
                                       0.000035 * std::exp((v + 5.0) / 6.0));
    constexpr double Aff = 0.6, Afs = 1.0 - Aff;
    const double fgate = Aff * s[S_ff] + Afs * s[S_fs];
    const double fcass = fss;
    const double tfcaf = 7.0 + 1.0 / (0.04 * std::exp(-(v - 4.0) / 7.0) +
                                      0.04 * std::exp((v - 4.0) / 7.0));
    const double tfcas = 100.0 + 1.0 / (0.00012 * std::exp(-v / 3.0) +
                                        0.00012 * std::exp(v / 7.0));
    const double Afcaf = 0.3 + 0.6 / (1.0 + std::exp((v - 10.0) / 10.0));
    const double Afcas = 1.0 - Afcaf;
    const double fca = Afcaf * s[S_fcaf] + Afcas * s[S_fcas];
    const double tjca = 75.0;
    const double tffp = 2.5 * tff;
    const double fp = Aff * s[S_ffp] + Afs * s[S_fs];
    const double tfcafp = 2.5 * tfcaf;
    const double fcap = Afcaf * s[S_fcafp] + Afcas * s[S_fcas];
    constexpr double Kmn = 0.002, k2n = 1000.0;
    const double km2n = s[S_jca] * 1.0;
    const double tmp_nca = 1.0 + Kmn / cass;
    const double anca = 1.0 / (k2n / km2n + tmp_nca * tmp_nca * tmp_nca * tmp_nca);
    // driving-force terms written with x/expm1(x) so v = 0 is regular;
    // 4*vffrt/(exp(2x)-1) == 2*F * x_over_expm1(2x)
    const double PhiCaL =
        2.0 * Frdy * (cass * std::exp(2.0 * vfrt) - 0.341 * cao) * x_over_expm1(2.0 * vfrt);
    const double PhiCaNa =
        Frdy * (0.75 * nass * std::exp(vfrt) - 0.75 * nao) * x_over_expm1(vfrt);
    const double PhiCaK = Frdy * (0.75 * kss * std::exp(vfrt) - 0.75 * ko) * x_over_expm1(vfrt);
    double PCa = 0.0001;
    if (epi) PCa *= 1.2;
    if (mid) PCa *= 2.5;
    const double PCap = 1.1 * PCa;
    const double PCaNa = 0.00125 * PCa, PCaK = 3.574e-4 * PCa;
    const double PCaNap = 0.00125 * PCap, PCaKp = 3.574e-4 * PCap;
    const double nca = s[S_nca];
    const double gate_np = s[S_d] * (fgate * (1.0 - nca) + s[S_jca] * fca * nca);
    const double gate_p = s[S_d] * (fp * (1.0 - nca) + s[S_jca] * fcap * nca);
    const double ICaL = (1.0 - fCaMK) * PCa * PhiCaL * gate_np + fCaMK * PCap * PhiCaL * gate_p;
    const double ICaNa =
        (1.0 - fCaMK) * PCaNa * PhiCaNa * gate_np + fCaMK * PCaNap * PhiCaNa * gate_p;
    const double ICaK =
        (1.0 - fCaMK) * PCaK * PhiCaK * gate_np + fCaMK * PCaKp * PhiCaK * gate_p;

    // ---- IKr (rapid delayed rectifier)
    const double xrss = 1.0 / (1.0 + std::exp(-(v + 8.337) / 6.789));
    const double txrf = 12.98 + 1.0 / (0.3652 * std::exp((v - 31.66) / 3.869) +
                                       4.123e-5 * std::exp(-(v - 47.78) / 20.38));
    const double txrs = 1.865 + 1.0 / (0.06629 * std::exp((v - 34.70) / 7.355) +
                                       1.128e-5 * std::exp(-(v - 29.74) / 25.94));
    const double Axrf = 1.0 / (1.0 + std::exp((v + 54.81) / 38.21));
    const double Axrs = 1.0 - Axrf;
    const double xr = Axrf * s[S_xrf] + Axrs * s[S_xrs];
    const double rkr =
        1.0 / (1.0 + std::exp((v + 55.0) / 75.0)) * 1.0 / (1.0 + std::exp((v - 10.0) / 30.0));
    double GKr = 0.046;
    if (epi) GKr *= 1.3;
    if (mid) GKr *= 0.8;
    const double IKr = GKr * std::sqrt(ko / 5.4) * xr * rkr * (v - EK);

    // ---- IKs (slow delayed rectifier)
    const double xs1ss = 1.0 / (1.0 + std::exp(-(v + 11.60) / 8.932));
    const double txs1 = 817.3 + 1.0 / (2.326e-4 * std::exp((v + 48.28) / 17.80) +
                                       0.001292 * std::exp(-(v + 210.0) / 230.0));
    const double xs2ss = xs1ss;
    const double txs2 =
        1.0 / (0.01 * std::exp((v - 50.0) / 20.0) + 0.0193 * std::exp(-(v + 66.54) / 31.0));
    const double KsCa = 1.0 + 0.6 / (1.0 + std::pow(3.8e-5 / cai, 1.4));
    double GKs = 0.0034;
    if (epi) GKs *= 1.4;
    const double IKs = GKs * KsCa * s[S_xs1] * s[S_xs2] * (v - EKs);

    // ---- IK1 (inward rectifier)
    const double xk1ss =
        1.0 / (1.0 + std::exp(-(v + 2.5538 * ko + 144.59) / (1.5692 * ko + 3.8115)));
    const double txk1 =
        122.2 / (std::exp(-(v + 127.2) / 20.36) + std::exp((v + 236.8) / 69.33));
    const double rk1 = 1.0 / (1.0 + std::exp((v + 105.8 - 2.6 * ko) / 9.493));
    double GK1 = 0.1908;
    if (epi) GK1 *= 1.2;
    if (mid) GK1 *= 1.3;
    const double IK1 = GK1 * std::sqrt(ko) * rk1 * s[S_xk1] * (v - EK);

    // ---- INaCa (Na/Ca exchanger), bulk and subspace components
    constexpr double kna1 = 15.0, kna2 = 5.0, kna3 = 88.12, kasymm = 12.5;
    constexpr double wna = 6.0e4, wca = 6.0e4, wnaca = 5.0e3;
    constexpr double kcaon = 1.5e6, kcaoff = 5.0e3;
    constexpr double qna = 0.5224, qca = 0.1670;
    const double hca = std::exp(qca * vfrt);
    const double hna = std::exp(qna * vfrt);
    double Gncx = 0.0008;
    if (epi) Gncx *= 1.1;
    if (mid) Gncx *= 1.4;
    constexpr double KmCaAct = 150.0e-6;
    constexpr double zna = 1.0, zca = 2.0;
    auto ncx = [&](double na_in, double ca_in) {
      const double h1 = 1.0 + na_in / kna3 * (1.0 + hna);
      const double h2 = na_in * hna / (kna3 * h1);
      const double h3 = 1.0 / h1;
      const double h4 = 1.0 + na_in / kna1 * (1.0 + na_in / kna2);
      const double h5 = na_in * na_in / (h4 * kna1 * kna2);
      const double h6 = 1.0 / h4;
      const double h7 = 1.0 + nao / kna3 * (1.0 + 1.0 / hna);
      const double h8 = nao / (kna3 * hna * h7);
      const double h9 = 1.0 / h7;
      const double h10 = kasymm + 1.0 + nao / kna1 * (1.0 + nao / kna2);
      const double h11 = nao * nao / (h10 * kna1 * kna2);
      const double h12 = 1.0 / h10;
      const double k1 = h12 * cao * kcaon;
      const double k2 = kcaoff;
      const double k3p = h9 * wca;
      const double k3pp = h8 * wnaca;
      const double k3 = k3p + k3pp;
      const double k4p = h3 * wca / hca;
      const double k4pp = h2 * wnaca;
      const double k4 = k4p + k4pp;
      const double k5 = kcaoff;
      const double k6 = h6 * ca_in * kcaon;
      const double k7 = h5 * h2 * wna;
      const double k8 = h8 * h11 * wna;
      const double x1 = k2 * k4 * (k7 + k6) + k5 * k7 * (k2 + k3);
      const double x2 = k1 * k7 * (k4 + k5) + k4 * k6 * (k1 + k8);
      const double x3 = k1 * k3 * (k7 + k6) + k8 * k6 * (k2 + k3);
      const double x4 = k2 * k8 * (k4 + k5) + k3 * k5 * (k1 + k8);
      const double sum = x1 + x2 + x3 + x4;
      const double E1 = x1 / sum, E2 = x2 / sum, E3 = x3 / sum, E4 = x4 / sum;
      const double allo_den = KmCaAct / ca_in;
      const double allo = 1.0 / (1.0 + allo_den * allo_den);
      const double JncxNa = 3.0 * (E4 * k7 - E1 * k8) + E3 * k4pp - E2 * k3pp;
      const double JncxCa = E2 * k2 - E1 * k1;
      return allo * (zna * JncxNa + zca * JncxCa);
    };
    const double INaCa_i = 0.8 * Gncx * ncx(nai, cai);
    const double INaCa_ss = 0.2 * Gncx * ncx(nass, cass);

    // ---- INaK (Na/K pump)
    constexpr double k1p = 949.5, k1m = 182.4, k2p = 687.2, k2m = 39.4;
    constexpr double k3p_nak = 1899.0, k3m = 79300.0, k4p_nak = 639.0, k4m = 40.0;
    constexpr double Knai0 = 9.073, Knao0 = 27.78, delta_nak = -0.1550;
    const double Knai = Knai0 * std::exp(delta_nak * vfrt / 3.0);
    const double Knao = Knao0 * std::exp((1.0 - delta_nak) * vfrt / 3.0);
    constexpr double Kki = 0.5, Kko = 0.3582;
    constexpr double MgADP = 0.05, MgATP = 9.8, Kmgatp = 1.698e-7;
    constexpr double Hconc = 1.0e-7, eP = 4.2, Khp = 1.698e-7, Knap = 224.0, Kxkur = 292.0;
    const double P = eP / (1.0 + Hconc / Khp + nai / Knap + ki / Kxkur);
    const double nai_knai = nai / Knai, ki_kki = ki / Kki;
    const double nao_knao = nao / Knao, ko_kko = ko / Kko;
    const double cub_i = std::pow(1.0 + nai_knai, 3.0), sq_i = std::pow(1.0 + ki_kki, 2.0);
    const double cub_o = std::pow(1.0 + nao_knao, 3.0), sq_o = std::pow(1.0 + ko_kko, 2.0);
    const double a1 = k1p * std::pow(nai_knai, 3.0) / (cub_i + sq_i - 1.0);
    const double b1 = k1m * MgADP;
    const double a2 = k2p;
    const double b2 = k2m * std::pow(nao_knao, 3.0) / (cub_o + sq_o - 1.0);
    const double a3 = k3p_nak * std::pow(ko_kko, 2.0) / (cub_o + sq_o - 1.0);
    const double b3 = k3m * P * Hconc / (1.0 + MgATP / Kmgatp);
    const double a4 = k4p_nak * MgATP / Kmgatp / (1.0 + MgATP / Kmgatp);
    const double b4 = k4m * std::pow(ki_kki, 2.0) / (cub_i + sq_i - 1.0);
    const double x1n = a4 * a1 * a2 + b2 * b4 * b3 + a2 * b4 * b3 + b3 * a1 * a2;
    const double x2n = b2 * b1 * b4 + a1 * a2 * a3 + a3 * b1 * b4 + a2 * a3 * b4;
    const double x3n = a2 * a3 * a4 + b3 * b2 * b1 + b2 * b1 * a4 + a3 * a4 * b1;
    const double x4n = b4 * b3 * b2 + a3 * a4 * a1 + b2 * a4 * a1 + b3 * b2 * a1;
    const double sumn = x1n + x2n + x3n + x4n;
    const double E1n = x1n / sumn, E2n = x2n / sumn, E3n = x3n / sumn, E4n = x4n / sumn;
    constexpr double zk = 1.0;
    const double JnakNa = 3.0 * (E1n * a3 - E2n * b3);
    const double JnakK = 2.0 * (E4n * b1 - E3n * a1);
    double Pnak = 30.0;
    if (epi) Pnak *= 0.9;
    if (mid) Pnak *= 0.7;
    const double INaK = Pnak * (zna * JnakNa + zk * JnakK);

    // ---- background and pump currents
    const double xkb = 1.0 / (1.0 + std::exp(-(v - 14.48) / 18.34));
    double GKb = 0.003;
    if (epi) GKb *= 0.6;
    const double IKb = GKb * xkb * (v - EK);
    constexpr double PNab = 3.75e-10;
    const double INab = PNab * Frdy * (nai * std::exp(vfrt) - nao) * x_over_expm1(vfrt);
    constexpr double PCab = 2.5e-8;
    const double ICab =
        PCab * 2.0 * Frdy * (cai * std::exp(2.0 * vfrt) - 0.341 * cao) * x_over_expm1(2.0 * vfrt);
    constexpr double GpCa = 0.0005;
    const double IpCa = GpCa * cai / (0.0005 + cai);

    // ---- fluxes, buffers, concentrations
    const double JdiffNa = (nass - nai) / 2.0;
    const double JdiffK = (kss - ki) / 2.0;
    const double Jdiff = (cass - cai) / 0.2;

    constexpr double bt = 4.75;
    const double a_rel = 0.5 * bt;
    double Jrel_inf = a_rel * (-ICaL) / (1.0 + std::pow(1.5 / cajsr, 8.0));
    if (mid) Jrel_inf *= 1.7;
    double tau_rel = bt / (1.0 + 0.0123 / cajsr);
    if (tau_rel < 0.005) tau_rel = 0.005;
    constexpr double btp = 1.25 * bt;
    const double a_relp = 0.5 * btp;
    double Jrel_infp = a_relp * (-ICaL) / (1.0 + std::pow(1.5 / cajsr, 8.0));
    if (mid) Jrel_infp *= 1.7;
    double tau_relp = btp / (1.0 + 0.0123 / cajsr);
    if (tau_relp < 0.005) tau_relp = 0.005;
    const double Jrel = (1.0 - fCaMK) * s[S_Jrelnp] + fCaMK * s[S_Jrelp];

    double Jupnp = 0.004375 * cai / (cai + 0.00092);
    double Jupp = 2.75 * 0.004375 * cai / (cai + 0.00092 - 0.00017);
    if (epi) {
      Jupnp *= 1.3;
      Jupp *= 1.3;
    }
    const double Jleak = 0.0039375 * cansr / 15.0;
    const double Jup = (1.0 - fCaMK) * Jupnp + fCaMK * Jupp - Jleak;
    const double Jtr = (cansr - cajsr) / 100.0;

    const double cmdnmax = epi ? 1.3 * cmdnmax_base : cmdnmax_base;
    const double kc_cai = kmcmdn + cai, kt_cai = kmtrpn + cai;
    const double Bcai =
        1.0 / (1.0 + cmdnmax * kmcmdn / (kc_cai * kc_cai) + trpnmax * kmtrpn / (kt_cai * kt_cai));
    const double kb_cass = KmBSR + cass, kl_cass = KmBSL + cass;
    const double Bcass =
        1.0 / (1.0 + BSRmax * KmBSR / (kb_cass * kb_cass) + BSLmax * KmBSL / (kl_cass * kl_cass));
    const double kq_cajsr = kmcsqn + cajsr;
    const double Bcajsr = 1.0 / (1.0 + csqnmax * kmcsqn / (kq_cajsr * kq_cajsr));

    // ---- state derivatives
    ds[S_m] = (mss - s[S_m]) / tm;
    ds[S_hf] = (hss - s[S_hf]) / thf;
    ds[S_hs] = (hss - s[S_hs]) / ths;
    ds[S_j] = (jss - s[S_j]) / tj;
    ds[S_hsp] = (hssp - s[S_hsp]) / thsp;
    ds[S_jp] = (jss - s[S_jp]) / tjp;
    ds[S_mL] = (mLss - s[S_mL]) / tmL;
    ds[S_hL] = (hLss - s[S_hL]) / thL;
    ds[S_hLp] = (hLssp - s[S_hLp]) / thLp;
    ds[S_a] = (ass - s[S_a]) / ta;
    ds[S_iF] = (iss - s[S_iF]) / tiF;
    ds[S_iS] = (iss - s[S_iS]) / tiS;
    ds[S_ap] = (assp - s[S_ap]) / ta;
    ds[S_iFp] = (iss - s[S_iFp]) / tiFp;
    ds[S_iSp] = (iss - s[S_iSp]) / tiSp;
    ds[S_d] = (dss - s[S_d]) / td;
    ds[S_ff] = (fss - s[S_ff]) / tff;
    ds[S_fs] = (fss - s[S_fs]) / tfs;
    ds[S_fcaf] = (fcass - s[S_fcaf]) / tfcaf;
    ds[S_fcas] = (fcass - s[S_fcas]) / tfcas;
    ds[S_jca] = (fcass - s[S_jca]) / tjca;
    ds[S_nca] = anca * k2n - km2n * nca;
    ds[S_ffp] = (fss - s[S_ffp]) / tffp;
    ds[S_fcafp] = (fcass - s[S_fcafp]) / tfcafp;
    ds[S_xrf] = (xrss - s[S_xrf]) / txrf;
    ds[S_xrs] = (xrss - s[S_xrs]) / txrs;
    ds[S_xs1] = (xs1ss - s[S_xs1]) / txs1;
    ds[S_xs2] = (xs2ss - s[S_xs2]) / txs2;
    ds[S_xk1] = (xk1ss - s[S_xk1]) / txk1;
    ds[S_Jrelnp] = (Jrel_inf - s[S_Jrelnp]) / tau_rel;
    ds[S_Jrelp] = (Jrel_infp - s[S_Jrelp]) / tau_relp;
    ds[S_CaMKt] = aCaMK * CaMKb * (CaMKb + s[S_CaMKt]) - bCaMK * s[S_CaMKt];

    ds[S_nai] = -(INa + INaL + 3.0 * INaCa_i + 3.0 * INaK + INab) * Acap / (Frdy * vmyo) +
                JdiffNa * vss / vmyo;
    ds[S_nass] = -(ICaNa + 3.0 * INaCa_ss) * Acap / (Frdy * vss) - JdiffNa;
    // The external stimulus is a pure membrane current here; it is not
    // assigned to a K+ carrier.
    ds[S_ki] =
        -(Ito + IKr + IKs + IK1 + IKb - 2.0 * INaK) * Acap / (Frdy * vmyo) + JdiffK * vss / vmyo;
    ds[S_kss] = -ICaK * Acap / (Frdy * vss) - JdiffK;
    ds[S_cai] = Bcai * (-(IpCa + ICab - 2.0 * INaCa_i) * Acap / (2.0 * Frdy * vmyo) -
                        Jup * vnsr / vmyo + Jdiff * vss / vmyo);
    ds[S_cass] = Bcass * (-(ICaL - 2.0 * INaCa_ss) * Acap / (2.0 * Frdy * vss) +
                          Jrel * vjsr / vss - Jdiff);
    ds[S_cansr] = Jup - Jtr * vjsr / vnsr;
    ds[S_cajsr] = Bcajsr * (Jtr - Jrel);

    dv = -(INa + INaL + Ito + ICaL + ICaNa + ICaK + IKr + IKs + IK1 + INaCa_i + INaCa_ss + INaK +
           IKb + INab + IpCa + ICab) +
         i_stim;
  }

private:
  int celltype_;
  std::string name_;
  std::vector<double> rest_;
};

// Quiescent equilibria (20 s stimulus-free relaxation at dt0/4) per variant;
// layout [V, states...] following StateIndex order.
const std::vector<double> kRestEndo = {
    -88.069987424096993, 6.7857694543304437, 6.7858240866305497, 145.2270611623554,
    145.22703970422316, 6.6496500901714538e-05, 6.5363220572944042e-05, 1.1773572696330052,
    1.1780931136267005, 0.0072940079209426727, 0.7004598461826681, 0.70045979343293074,
    0.70045953530570237, 0.45778977781006114, 0.70045939195427553, 0.0001858428745214649,
    0.51535061430259566, 0.31721806727437052, 0.0009965088352518912, 0.99955951365975104,
    0.99955949399976396, 0.00050774700555622921, 0.99955951368195861, 0.99955949654005649,
    2.3033854222194026e-09, 0.99999999104293114, 0.99999999105447779, 0.99999999104293658,
    0.99999999104087156, 0.99999999104142678, 0.0010021110565670483, 0.99999999104268988,
    0.99999999104270343, 7.9332827982721131e-06, 7.9336066064785696e-06,
    0.00019132437263296958, 0.00019132414231280508, 0.99674141905341751,
    5.4200685188624244e-08, 6.7752012471923812e-08, 0.0003810650518518126};
const std::vector<double> kRestEpi = {
    -88.029323128607928, 6.7962192631889486, 6.7962623821225367, 145.20458892004748,
    145.20456959400204, 5.4852819578522002e-05, 5.4064603199250324e-05, 1.2563944307309074,
    1.2563851562790889, 0.0073238975664768622, 0.69905606284853461, 0.69905600543119961,
    0.69905572480467026, 0.45613173681108238, 0.69905556898249277, 0.00018728379656753348,
    0.51399396544560239, 0.3160425988040147, 0.00099924415555908345, 0.99955636760901723,
    0.99955636599890663, 0.00050914140569242004, 0.99955636761083866, 0.99955636620603716,
    2.3256353623298777e-09, 0.99999999094384107, 0.99999999095528003, 0.99999999094384651,
    0.99999999094178149, 0.99999999094233671, 0.00047971941613231592, 0.9999999909435997,
    0.99999999094361336, 7.9809446184557774e-06, 7.9812954631181394e-06,
    0.00019219809297998605, 0.00019219700739629426, 0.99675215233995673,
    1.0117197919343792e-07, 1.2646498743342686e-07, 0.00025496603469158611};
const std::vector<double> kRestMid = {
    -87.918787307816828, 6.8844140619690002, 6.8844676613520441, 145.13903811434193,
    145.13902449899223, 6.3130680404950644e-05, 6.1753113171964479e-05, 1.1286605779696908,
    1.129987340810549, 0.00740576098250912, 0.69522137580095822, 0.69522116072571494,
    0.69522011165021347, 0.45162926254354163, 0.69521952838802525, 0.00019125728633946081,
    0.51029968338090503, 0.31284466603507399, 0.0010067174531280458, 0.99954770073199861,
    0.99954761833889205, 0.00051295113113861634, 0.99954770082322897, 0.99954762898761162,
    2.3872087752034307e-09, 0.99999999066891365, 0.99999999064687006, 0.99999999066891909,
    0.99999999066685408, 0.9999999906674093, 0.00080416517322784442, 0.99999999066867218,
    0.99999999066868595, 8.1119973876114768e-06, 8.1133560675743664e-06,
    0.00019463394428381671, 0.00019459031922160661, 0.99678115341920093,
    1.7708324928868821e-07, 2.2136126205224297e-07, 0.00034040551198936118};

std::shared_ptr<const CellModel> make_variant(int celltype, const char* name,
                                              const std::vector<double>& rest) {
  return std::make_shared<const OharaRudy>(celltype, name, rest);
}

} // namespace

std::shared_ptr<const CellModel> make_ohara_rudy(int celltype) {
  static const auto endo = make_variant(0, "ohara2011-endo", kRestEndo);
  static const auto epi = make_variant(1, "ohara2011-epi", kRestEpi);
  static const auto mid = make_variant(2, "ohara2011-mid", kRestMid);
  switch (celltype) {
    case 1: return epi;
    case 2: return mid;
    default: return endo;
  }
}

} // namespace cardwave::detail
