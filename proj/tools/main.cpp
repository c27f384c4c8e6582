#include "cardwave/config.hpp"
#include "cardwave/errors.hpp"
#include "cardwave/output.hpp"
#include "cardwave/runner.hpp"
#include "cardwave/splitting.hpp"
#include "cardwave/stimulus.hpp"

#include "../tests/oracles/oracles.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cw = cardwave;

namespace {

struct CommonArgs {
  std::string config_path;
  int workers = 0;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  std::string output_dir;
  bool strict_substeps = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--workers", args.workers, "solver worker threads (0: all cores)");
  cmd->add_option("--seed-override", args.seed_override, "replace the fibrosis seed")
      ->each([&args](const std::string&) { args.has_seed_override = true; });
  cmd->add_option("--output-dir", args.output_dir,
                  "output directory (default: config, then $CARDWAVE_OUTPUT_DIR, then ./out)");
  cmd->add_flag("--strict-substeps", args.strict_substeps,
                "use the ceiling rule for diffusion sub-steps (guarantees dt_ad <= dt_s)");
}

cw::RunOverrides to_overrides(const CommonArgs& args) {
  cw::RunOverrides ovr;
  ovr.workers = args.workers;
  if (args.has_seed_override) ovr.seed = args.seed_override;
  ovr.output_dir = args.output_dir;
  ovr.strict_substeps = args.strict_substeps;
  return ovr;
}

int run_cmd(const CommonArgs& args) {
  const cw::RunConfig cfg = cw::parse_config_file(args.config_path);
  const cw::RunArtifacts art = cw::cli_run(cfg, to_overrides(args), &std::cout);
  std::cout << "run: scheme " << art.report.scheme << ", " << art.report.n_steps
            << " steps, dt_s = " << art.report.dt_s_ms
            << " ms, wall = " << art.report.total_wall_ms / 1000.0 << " s (reaction "
            << art.report.reaction_ms / 1000.0 << " s, diffusion "
            << art.report.diffusion_ms / 1000.0 << " s)\n";
  std::cout << "run: artifacts in " << art.output_dir << "\n";
  return 0;
}

int dts_cmd(const CommonArgs& args, bool spectral) {
  cw::RunConfig cfg = cw::parse_config_file(args.config_path);
  if (spectral) cfg.dts.spectral_check = true;
  const auto rows = cw::cli_dts(cfg, to_overrides(args), nullptr);

  std::printf("%8s %10s %10s %12s", "h_um", "nodes", "elements", "dt_s_ms");
  if (cfg.dts.spectral_check) std::printf(" %14s", "2/lambda_max");
  std::printf("\n");
  std::vector<cw::DtsRow> out_rows = rows;
  for (auto& r : out_rows) {
    if (cfg.dts.spectral_check) {
      cw::RunConfig one = cfg;
      one.mesh.h_cm = r.h_um * 1e-4;
      cw::PreparedProblem prob = cw::prepare_problem(one, to_overrides(args));
      r.spectral_step_ms = cw::oracles::spectral_bound(prob.op).critical_step;
    }
    std::printf("%8g %10lld %10lld %12.6g", r.h_um, static_cast<long long>(r.nodes),
                static_cast<long long>(r.elements), r.dt_s_ms);
    if (cfg.dts.spectral_check) std::printf(" %14.6g", r.spectral_step_ms);
    std::printf("\n");
  }

  const std::string dir = cw::resolve_output_dir(cfg, to_overrides(args));
  std::filesystem::create_directories(dir);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : out_rows)
    j.push_back({{"h_um", r.h_um},
                 {"nodes", r.nodes},
                 {"elements", r.elements},
                 {"dt_s_ms", r.dt_s_ms},
                 {"spectral_step_ms", r.spectral_step_ms}});
  std::ofstream f(dir + "/dts.json");
  f << j.dump(2) << "\n";
  return 0;
}

int compare_cmd(const CommonArgs& args, const std::vector<std::string>& schemes) {
  const cw::RunConfig cfg = cw::parse_config_file(args.config_path);
  std::vector<std::string> list = schemes.empty() ? cfg.compare.schemes : schemes;
  if (list.empty()) throw cw::ValidationError("compare: no schemes given (flag or config)");
  const cw::CompareReport rep = cw::cli_compare(cfg, list, to_overrides(args), &std::cout);

  double ref_wall = 0.0;
  for (const auto& s : rep.schemes)
    if (s.scheme == rep.reference) ref_wall = s.wall_ms;
  std::printf("reference scheme: %s\n", rep.reference.c_str());
  std::printf("%8s %12s %12s %10s %10s %12s %12s\n", "scheme", "CV_cm_ms", "APD90_ms", "e_LAT",
              "e_APD", "maxdV_mV", "wall_s");
  for (const auto& s : rep.schemes) {
    const double apd = s.apd90_per_probe.empty() ? std::nan("") : s.apd90_per_probe.front();
    const double mdv = s.max_dv_per_probe.empty() ? std::nan("") : s.max_dv_per_probe.front();
    std::printf("%8s %12.5g %12.6g %10.3g %10.3g %12.4g %12.4g\n", s.scheme.c_str(),
                s.cv_cm_per_ms, apd, s.e_lat, s.e_apd, mdv, s.wall_ms / 1000.0);
  }
  if (ref_wall > 0.0) {
    for (const auto& s : rep.schemes)
      if (s.scheme != rep.reference)
        std::printf("speedup %s vs %s: x%.2f\n", rep.reference.c_str(), s.scheme.c_str(),
                    ref_wall / s.wall_ms);
  }

  const std::string dir = cw::resolve_output_dir(cfg, to_overrides(args));
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["reference"] = rep.reference;
  for (const auto& s : rep.schemes)
    j["schemes"].push_back({{"scheme", s.scheme},
                            {"cv_cm_per_ms", s.cv_cm_per_ms},
                            {"apd90_ms", s.apd90_per_probe},
                            {"e_lat", s.e_lat},
                            {"e_apd", s.e_apd},
                            {"max_dv_mv", s.max_dv_per_probe},
                            {"wall_ms", s.wall_ms},
                            {"reaction_ms", s.reaction_ms},
                            {"diffusion_ms", s.diffusion_ms}});
  std::ofstream f(dir + "/compare.json");
  f << j.dump(2) << "\n";
  return 0;
}

int cell_cmd(const std::string& model_name, double cl, int beats, double amplitude,
             double duration, bool estimate, const std::string& trace_path) {
  const auto model = cw::make_model(model_name);
  if (estimate) {
    const double dt0 = cw::estimate_dt0(*model);
    std::printf("%s: bisected stable step dt0 = %.6g ms (metadata dt0 = %.6g ms)\n",
                model->name().c_str(), dt0, model->stable_step());
    return 0;
  }
  const cw::PacingResult r = cw::pace_to_steady_state(*model, cl, beats, amplitude, duration);
  std::printf("%s: %d beats at CL %g ms\n", model->name().c_str(), beats, cl);
  if (!r.apd90_ms.empty()) {
    const double last = r.apd90_ms.back();
    std::printf("  APD90(final beat) = %.6g ms\n", last);
    if (r.apd90_ms.size() >= 2) {
      const double prev = r.apd90_ms[r.apd90_ms.size() - 2];
      std::printf("  beat-to-beat APD90 change = %.4g ms\n", std::abs(last - prev));
    }
  }
  std::printf("  max relative end-diastolic state change = %.4g\n", r.max_rel_change);
  if (!trace_path.empty()) {
    // re-run the final beat recording a trace
    const auto model2 = cw::make_model(model_name);
    std::vector<double> st = r.state;
    const double dt = model2->stable_step() / 2.0;
    cw::Trace tr;
    tr.name = model_name;
    double ds[64];
    const std::int64_t steps = static_cast<std::int64_t>(std::llround(cl / dt));
    for (std::int64_t i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) * dt;
      if (i % std::max<std::int64_t>(1, std::llround(0.1 / dt)) == 0) {
        tr.t_ms.push_back(t);
        tr.v_mv.push_back(st[0]);
      }
      double dv;
      model2->rates(st[0], st.data() + 1, t < duration ? amplitude : 0.0, dv, ds);
      st[0] += dt * dv;
      for (int k = 0; k < model2->state_count(); ++k) st[1 + k] += dt * ds[k];
    }
    cw::write_trace_csv(tr, trace_path);
    std::printf("  trace written to %s\n", trace_path.c_str());
  }
  return 0;
}

int threshold_cmd(const CommonArgs& args) {
  const cw::RunConfig cfg = cw::parse_config_file(args.config_path);
  if (!cfg.threshold.enabled)
    throw cw::ValidationError("threshold: config needs a threshold section");
  cw::PreparedProblem prob = cw::prepare_problem(cfg, to_overrides(args));
  const auto nodes = cw::select_nodes(prob.mesh, cfg.threshold.region);
  if (nodes.empty()) throw cw::ValidationError("threshold: region selects no nodes");
  if (prob.models.size() != 1)
    throw cw::ValidationError("threshold: exactly one cell model expected");
  cw::ThresholdOptions opt;
  opt.duration_ms = cfg.threshold.duration_ms;
  opt.initial_guess = cfg.threshold.initial_guess;
  const double thr = cw::diastolic_threshold(prob.mesh, prob.op, *prob.models[0], nodes, opt);
  std::printf("diastolic threshold: %.6g mV/ms (2x = %.6g mV/ms)\n", thr, 2.0 * thr);
  return 0;
}

int oracle_cmd(const std::string& target, const CommonArgs& args) {
  if (target == "spectral") {
    const cw::RunConfig cfg = cw::parse_config_file(args.config_path);
    cw::PreparedProblem prob = cw::prepare_problem(cfg, to_overrides(args));
    const auto sb = cw::oracles::spectral_bound(prob.op);
    std::printf("lambda_max = %.8g 1/ms, 2/lambda_max = %.8g ms, gershgorin dt_s = %.8g ms\n",
                sb.lambda_max, sb.critical_step, prob.op.dt_s);
    return 0;
  }
  if (target == "linear-convergence") {
    cw::oracles::LinearTestProblem problem;
    // spatially varying decay so the split operators do not commute
    const cw::Mesh mesh = problem.make_mesh();
    const cw::AssembledOperator op = problem.make_operator(mesh);
    const cw::oracles::ExactDiffusion exact(op);
    std::vector<double> decay(static_cast<std::size_t>(mesh.node_count()));
    for (std::int64_t i = 0; i < mesh.node_count(); ++i)
      decay[i] = problem.decay_per_ms * (1.0 + mesh.node_coords[i][0] / problem.lx_cm);
    const std::vector<double> u0 = problem.initial_field(mesh);
    const double t_end = 2.0;
    const auto ref =
        cw::oracles::strang_linear_run(op, exact, decay, u0, t_end, t_end / 1024.0, false);
    std::vector<double> dts, errs;
    for (double dt : {t_end / 4.0, t_end / 8.0, t_end / 16.0, t_end / 32.0}) {
      const auto u = cw::oracles::strang_linear_run(op, exact, decay, u0, t_end, dt, false);
      double e = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - ref[i]));
      dts.push_back(dt);
      errs.push_back(e);
      std::printf("exact sub-integrators: dt = %.5g, Linf error = %.6g\n", dt, e);
    }
    std::printf("observed order (exact sub-integrators): %.3f\n",
                cw::oracles::observed_order(dts, errs));
    return 0;
  }
  if (target == "reference") {
    const cw::RunConfig cfg = cw::parse_config_file(args.config_path);
    cw::PreparedProblem prob = cw::prepare_problem(cfg, to_overrides(args));
    cw::ProtocolIndex index(prob.protocol, prob.mesh.node_count());
    cw::NodeStateArray state = cw::make_initial_state(prob.mesh, prob.models, prob.model_of_tag,
                                                      prob.initial_per_model);
    const auto res = cw::oracles::reference_solution(prob.op, prob.models, std::move(state),
                                                     &index, prob.probes, cfg.scheme.t_end_ms,
                                                     cfg.scheme.record_interval_ms);
    const std::string dir = cw::resolve_output_dir(cfg, to_overrides(args));
    std::filesystem::create_directories(dir);
    for (const auto& tr : res.traces)
      cw::write_trace_csv(tr, dir + "/reference_trace_" + tr.name + ".csv");
    std::printf("reference solution: dt = %.6g ms, %lld steps, traces in %s\n", res.dt_effective,
                static_cast<long long>(res.n_steps), dir.c_str());
    return 0;
  }
  throw cw::ValidationError("oracle: unknown subtarget '" + target +
                            "' (spectral, reference, linear-convergence)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardwave - monodomain cardiac electrophysiology with adaptive explicit splitting"};
  app.require_subcommand(1);

  CommonArgs run_args, dts_args, cmp_args, thr_args, oracle_args;
  bool dts_spectral = false;
  std::vector<std::string> cmp_schemes;
  std::string cell_model = "ohara2011-epi", cell_trace;
  double cell_cl = 1000.0, cell_amplitude = 80.0, cell_duration = 1.0;
  int cell_beats = 100;
  bool cell_estimate = false;
  std::string oracle_target;

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  add_common(run, run_args);

  auto* dts = app.add_subcommand("dts", "stable-step table over a spacing sweep");
  add_common(dts, dts_args);
  dts->add_flag("--spectral", dts_spectral, "add a brute-force spectral-bound column");

  auto* cmp = app.add_subcommand("compare", "run several schemes on one problem and compare");
  add_common(cmp, cmp_args);
  cmp->add_option("--schemes", cmp_schemes, "schemes to run (default: config compare.schemes)")
      ->delimiter(',');

  auto* cell = app.add_subcommand("cell", "single-cell pacing and stable-step tools");
  cell->add_option("--model", cell_model, "registered model name")->capture_default_str();
  cell->add_option("--cl", cell_cl, "pacing cycle length (ms)")->capture_default_str();
  cell->add_option("--beats", cell_beats, "number of beats")->capture_default_str();
  cell->add_option("--amplitude", cell_amplitude, "stimulus amplitude (mV/ms)")
      ->capture_default_str();
  cell->add_option("--duration", cell_duration, "stimulus duration (ms)")->capture_default_str();
  cell->add_flag("--estimate-dt0", cell_estimate, "bisect the largest stable forward-Euler step");
  cell->add_option("--trace", cell_trace, "write a final-beat voltage trace CSV here");

  auto* thr = app.add_subcommand("threshold", "diastolic-threshold bisection");
  add_common(thr, thr_args);

  auto* oracle = app.add_subcommand("oracle", "verification oracles");
  oracle->group(""); // hidden
  oracle->add_option("target", oracle_target, "spectral | reference | linear-convergence")
      ->required();
  oracle->add_option("--config", oracle_args.config_path, "config file");
  oracle->add_option("--workers", oracle_args.workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_cmd(run_args);
    if (dts->parsed()) return dts_cmd(dts_args, dts_spectral);
    if (cmp->parsed()) return compare_cmd(cmp_args, cmp_schemes);
    if (cell->parsed())
      return cell_cmd(cell_model, cell_cl, cell_beats, cell_amplitude, cell_duration,
                      cell_estimate, cell_trace);
    if (thr->parsed()) return threshold_cmd(thr_args);
    if (oracle->parsed()) return oracle_cmd(oracle_target, oracle_args);
  } catch (const cw::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cw::InstabilityError& e) {
    std::cerr << "numerical instability: " << e.what() << "\n";
    return 3;
  } catch (const cw::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
