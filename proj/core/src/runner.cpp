#include "cardwave/runner.hpp"

#include "cardwave/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

namespace cardwave {

namespace {
using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Paced states are reused across schemes within a process (cli_compare runs
// the same cell preparation for every scheme).
std::vector<double> paced_state(const std::shared_ptr<const CellModel>& model,
                                const PacingSpec& pacing) {
  static std::map<std::string, std::vector<double>> cache;
  std::ostringstream key;
  key << model->name() << "|" << pacing.cycle_length_ms << "|" << pacing.n_beats << "|"
      << pacing.stim_amplitude << "|" << pacing.stim_duration_ms;
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;
  const PacingResult r = pace_to_steady_state(*model, pacing.cycle_length_ms, pacing.n_beats,
                                              pacing.stim_amplitude, pacing.stim_duration_ms);
  cache[key.str()] = r.state;
  return r.state;
}

} // namespace

std::string resolve_output_dir(const RunConfig& cfg, const RunOverrides& ovr) {
  if (!ovr.output_dir.empty()) return ovr.output_dir;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv("CARDWAVE_OUTPUT_DIR"); env && *env) return env;
  return "out";
}

PreparedProblem prepare_problem(const RunConfig& cfg, const RunOverrides& ovr) {
  PreparedProblem prob;
  const auto t0 = Clock::now();

  prob.mesh = build_regular_sheet(cfg.mesh.lx_cm, cfg.mesh.ly_cm, cfg.mesh.h_cm,
                                  cfg.mesh.fiber_angle_rad);
  if (cfg.fibrosis.enabled && cfg.fibrosis.fraction > 0.0) {
    const std::uint64_t seed = ovr.seed.value_or(cfg.fibrosis.seed);
    prob.mesh = assign_fibrosis(prob.mesh, cfg.fibrosis.fraction, seed);
  }

  prob.field = build_diffusion_field(prob.mesh, cfg.diffusion.d0_myocyte,
                                     cfg.diffusion.d0_fibrotic, cfg.diffusion.rho);
  prob.op = assemble(prob.mesh, prob.field);
  prob.assembly_ms = ms_since(t0);

  // tag -> model wiring
  prob.model_of_tag.assign(prob.mesh.tag_names.size(), -1);
  std::map<std::string, int> model_index;
  for (std::size_t t = 0; t < prob.mesh.tag_names.size(); ++t) {
    const auto it = cfg.models.find(prob.mesh.tag_names[t]);
    if (it == cfg.models.end())
      throw ValidationError("models: mesh tag '" + prob.mesh.tag_names[t] +
                            "' has no model assignment");
    auto mi = model_index.find(it->second);
    if (mi == model_index.end()) {
      prob.models.push_back(make_model(it->second));
      mi = model_index.emplace(it->second, static_cast<int>(prob.models.size() - 1)).first;
    }
    prob.model_of_tag[t] = mi->second;
  }

  if (cfg.pacing.enabled) {
    prob.initial_per_model.resize(prob.models.size());
    for (std::size_t m = 0; m < prob.models.size(); ++m)
      prob.initial_per_model[m] = paced_state(prob.models[m], cfg.pacing);
  }

  for (const auto& st : cfg.protocol) {
    Stimulus s;
    s.nodes = select_nodes(prob.mesh, st.region);
    if (s.nodes.empty())
      throw ValidationError("protocol: stimulus '" + st.label + "' selects no nodes");
    s.t_start_ms = st.t_start_ms;
    s.duration_ms = st.duration_ms;
    s.amplitude = st.amplitude;
    s.period_ms = st.period_ms;
    s.label = st.label;
    prob.protocol.entries.push_back(std::move(s));
  }

  for (const auto& p : cfg.probes) {
    Probe probe;
    probe.node = prob.mesh.nearest_node(p.x_cm, p.y_cm);
    probe.name = p.name;
    prob.probes.push_back(std::move(probe));
  }
  return prob;
}

SimulationResult run_prepared(const PreparedProblem& prob, SchemeConfig scheme_cfg,
                              std::ostream* log) {
  SimulationSetup setup;
  setup.op = &prob.op;
  setup.models = prob.models;
  ProtocolIndex index(prob.protocol, prob.mesh.node_count());
  setup.protocol = &index;
  setup.probes = prob.probes;
  if (log) {
    setup.progress_every = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(50.0 / scheme_cfg.dt_ms)));
    setup.on_progress = [log](std::int64_t step, double t, const TimingBreakdown& tb) {
      (*log) << "progress step=" << step << " t_ms=" << t << " wall_ms=" << tb.total_ms
             << " reaction_ms=" << tb.reaction_ms << " diffusion_ms=" << tb.diffusion_ms
             << std::endl;
    };
  }
  NodeStateArray state =
      make_initial_state(prob.mesh, prob.models, prob.model_of_tag, prob.initial_per_model);
  return run_simulation(std::move(state), setup, scheme_cfg);
}

RunArtifacts cli_run(const RunConfig& cfg, const RunOverrides& ovr, std::ostream* log) {
  namespace fs = std::filesystem;
  const auto t0 = Clock::now();

  RunConfig effective = cfg;
  if (ovr.strict_substeps) effective.scheme.strict_substeps = true;
  if (ovr.scheme) effective.scheme.scheme = *ovr.scheme;
  if (ovr.workers > 0) effective.scheme.workers = ovr.workers;
  effective.scheme.validate();

  PreparedProblem prob = prepare_problem(effective, ovr);

  RunArtifacts art;
  art.output_dir = resolve_output_dir(effective, ovr);
  std::error_code ec;
  fs::create_directories(art.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + art.output_dir);

  SimulationSetup setup;
  setup.op = &prob.op;
  setup.models = prob.models;
  ProtocolIndex index(prob.protocol, prob.mesh.node_count());
  setup.protocol = &index;
  setup.probes = prob.probes;
  setup.lat_threshold_mv = effective.output.lat_threshold_mv;

  double output_ms = 0.0;
  int snapshot_counter = 0;
  if (effective.output.snapshot_interval_ms > 0.0) {
    setup.snapshot_interval_ms = effective.output.snapshot_interval_ms;
    setup.on_snapshot = [&](double t, const std::vector<double>& v) {
      const auto ts = Clock::now();
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04d.vtk", snapshot_counter++);
      write_vtk_snapshot(prob.mesh, v, t, (fs::path(art.output_dir) / name).string());
      output_ms += ms_since(ts);
    };
  }
  if (log && !ovr.quiet) {
    setup.progress_every = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(50.0 / effective.scheme.dt_ms)));
    setup.on_progress = [log](std::int64_t step, double t, const TimingBreakdown& tb) {
      (*log) << "progress step=" << step << " t_ms=" << t << " wall_ms=" << tb.total_ms
             << " reaction_ms=" << tb.reaction_ms << " diffusion_ms=" << tb.diffusion_ms
             << std::endl;
    };
  }

  if (effective.output.dump_operator) {
    const auto ts = Clock::now();
    dump_operator(prob.op, (fs::path(art.output_dir) / "stiffness.txt").string());
    output_ms += ms_since(ts);
  }

  NodeStateArray state =
      make_initial_state(prob.mesh, prob.models, prob.model_of_tag, prob.initial_per_model);
  art.result = run_simulation(std::move(state), setup, effective.scheme);

  const auto t_out = Clock::now();
  for (const auto& tr : art.result.traces)
    write_trace_csv(tr, (fs::path(art.output_dir) / ("trace_" + tr.name + ".csv")).string());
  if (effective.output.write_maps) {
    write_map_csv(prob.mesh, art.result.lat_map,
                  (fs::path(art.output_dir) / "lat_map.csv").string());
    write_map_csv(prob.mesh, art.result.apd90_map,
                  (fs::path(art.output_dir) / "apd90_map.csv").string());
    if (effective.output.write_vtk_maps) {
      write_map_vtk(prob.mesh, art.result.lat_map, "LAT",
                    (fs::path(art.output_dir) / "lat_map.vtk").string());
      write_map_vtk(prob.mesh, art.result.apd90_map, "APD90",
                    (fs::path(art.output_dir) / "apd90_map.vtk").string());
    }
  }
  output_ms += ms_since(t_out);

  RunReport& rep = art.report;
  rep.scheme = to_string(effective.scheme.scheme);
  rep.dt_ms = effective.scheme.dt_ms;
  rep.dt_effective_ms = art.result.dt_effective;
  rep.dt_s_ms = art.result.dt_s;
  rep.dt_ad_ms = art.result.plan.dt_ad;
  rep.l = art.result.plan.l;
  rep.t_end_ms = effective.scheme.t_end_ms;
  rep.n_steps = art.result.n_steps;
  rep.assembly_ms = prob.assembly_ms;
  rep.reaction_ms = art.result.timing.reaction_ms;
  rep.diffusion_ms = art.result.timing.diffusion_ms;
  rep.output_ms = output_ms + art.result.timing.recording_ms;
  rep.total_wall_ms = ms_since(t0);
  rep.k_histogram = art.result.k_histogram;
  rep.workers = effective.scheme.workers;
  rep.fibrosis_seed = ovr.seed.value_or(effective.fibrosis.seed);
  rep.fibrosis_rng = fibrosis_rng_name;
  rep.config_echo = effective.config_echo;
  write_report_json(rep, (fs::path(art.output_dir) / "report.json").string());
  return art;
}

std::vector<DtsRow> cli_dts(const RunConfig& cfg, const RunOverrides& ovr, std::ostream* log) {
  if (!cfg.dts.enabled || cfg.dts.spacings_um.empty())
    throw ValidationError("dts: config needs a dts.spacings_um list");
  std::vector<DtsRow> rows;
  for (double h_um : cfg.dts.spacings_um) {
    RunConfig one = cfg;
    // Spacings that do not divide the sheet are snapped to the nearest
    // coarser divisor (cells = floor(Lx/h)), which reproduces the usual
    // published node counts for 5x5 cm sheets at 180/160/140/120 um.
    const std::int64_t cells =
        static_cast<std::int64_t>(std::floor(cfg.mesh.lx_cm / (h_um * 1e-4) + 1e-9));
    if (cells < 1) throw ValidationError("dts: spacing larger than the sheet");
    one.mesh.h_cm = cfg.mesh.lx_cm / static_cast<double>(cells);
    PreparedProblem prob = prepare_problem(one, ovr);
    DtsRow row;
    row.h_um = h_um;
    row.nodes = prob.mesh.node_count();
    row.elements = prob.mesh.element_count();
    row.dt_s_ms = prob.op.dt_s;
    rows.push_back(row);
    if (log)
      (*log) << "dts h_um=" << h_um << " nodes=" << row.nodes << " elements=" << row.elements
             << " dt_s_ms=" << row.dt_s_ms << std::endl;
  }
  return rows;
}

CompareReport cli_compare(const RunConfig& cfg, const std::vector<std::string>& scheme_names,
                          const RunOverrides& ovr, std::ostream* log) {
  if (scheme_names.size() < 2)
    throw ValidationError("compare: need at least two schemes");

  RunConfig effective = cfg;
  if (ovr.strict_substeps) effective.scheme.strict_substeps = true;
  if (ovr.workers > 0) effective.scheme.workers = ovr.workers;
  PreparedProblem prob = prepare_problem(effective, ovr);

  // reference: the configured one if listed, else the first entry
  std::string reference = effective.compare.reference;
  if (std::find(scheme_names.begin(), scheme_names.end(), reference) == scheme_names.end())
    reference = scheme_names.front();

  struct SchemeRun {
    std::string name;
    SimulationResult result;
  };
  std::vector<SchemeRun> runs;
  for (const auto& name : scheme_names) {
    SchemeConfig sc = effective.scheme;
    sc.scheme = scheme_from_string(name);
    // comparisons always use the conventional steps: 0.01 ms for OST,
    // 0.1 ms for OSTAR and DAETI (OSTAR then drops to dt_s on fine meshes)
    sc.dt_ms = sc.scheme == Scheme::OST ? 0.01 : 0.1;
    if (log)
      (*log) << "compare: running " << name << " (dt = " << sc.dt_ms << " ms)" << std::endl;
    SimulationResult r = run_prepared(prob, sc, nullptr);
    runs.push_back({name, std::move(r)});
  }

  const SchemeRun* ref = nullptr;
  for (const auto& r : runs)
    if (r.name == reference) ref = &r;

  CompareReport report;
  report.reference = reference;
  for (const auto& r : runs) {
    SchemeComparison c;
    c.scheme = r.name;
    c.wall_ms = r.result.timing.total_ms;
    c.reaction_ms = r.result.timing.reaction_ms;
    c.diffusion_ms = r.result.timing.diffusion_ms;

    if (prob.probes.size() >= 2) {
      try {
        c.cv_cm_per_ms =
            compute_cv(prob.mesh, r.result.lat_map, prob.probes[0].node, prob.probes[1].node);
      } catch (const ValidationError&) {
        c.cv_cm_per_ms = std::nan("");
      }
    } else {
      c.cv_cm_per_ms = std::nan("");
    }
    for (const auto& tr : r.result.traces) {
      const auto apd = compute_apd90(tr);
      c.apd90_per_probe.push_back(apd ? *apd : std::nan(""));
    }
    if (&r != ref) {
      c.e_lat = nrmse(ref->result.lat_map, r.result.lat_map);
      c.e_apd = nrmse(ref->result.apd90_map, r.result.apd90_map);
      for (std::size_t p = 0; p < r.result.traces.size(); ++p)
        c.max_dv_per_probe.push_back(align_and_diff(ref->result.traces[p], r.result.traces[p]));
    } else {
      c.max_dv_per_probe.assign(r.result.traces.size(), 0.0);
    }
    report.schemes.push_back(std::move(c));
  }
  return report;
}

} // namespace cardwave
