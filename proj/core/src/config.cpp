#include "cardwave/config.hpp"

#include "cardwave/errors.hpp"
#include "cardwave/ionic.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cardwave {

namespace {

using nlohmann::json;

class Violations {
public:
  void add(const std::string& msg) { messages_.push_back(msg); }
  bool empty() const { return messages_.empty(); }
  [[noreturn]] void raise() const {
    std::ostringstream os;
    os << "config: " << messages_.size() << " violation(s):";
    for (const auto& m : messages_) os << "\n  - " << m;
    throw ValidationError(os.str());
  }

private:
  std::vector<std::string> messages_;
};

double get_num(const json& j, const char* section, const char* key, Violations& err,
               double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) err.add(std::string(section) + "." + key + " is required");
    return fallback;
  }
  if (!j[key].is_number()) {
    err.add(std::string(section) + "." + key + " must be a number");
    return fallback;
  }
  return j[key].get<double>();
}

RegionSelector parse_region(const json& j, const std::string& where, Violations& err) {
  RegionSelector sel;
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    err.add(where + ".region needs a string 'kind'");
    return sel;
  }
  const std::string kind = j["kind"].get<std::string>();
  const char* w = where.c_str();
  if (kind == "half_plane_x_le" || kind == "half_plane_x_ge" || kind == "half_plane_y_le" ||
      kind == "half_plane_y_ge") {
    sel.kind = kind == "half_plane_x_le"   ? RegionSelector::Kind::half_plane_x_le
               : kind == "half_plane_x_ge" ? RegionSelector::Kind::half_plane_x_ge
               : kind == "half_plane_y_le" ? RegionSelector::Kind::half_plane_y_le
                                           : RegionSelector::Kind::half_plane_y_ge;
    sel.value = get_num(j, w, "value", err, 0.0, true);
  } else if (kind == "rectangle") {
    sel.kind = RegionSelector::Kind::rectangle;
    sel.x0 = get_num(j, w, "x0", err, 0.0, true);
    sel.x1 = get_num(j, w, "x1", err, 0.0, true);
    sel.y0 = get_num(j, w, "y0", err, 0.0, true);
    sel.y1 = get_num(j, w, "y1", err, 0.0, true);
  } else if (kind == "disc") {
    sel.kind = RegionSelector::Kind::disc;
    sel.cx = get_num(j, w, "cx", err, 0.0, true);
    sel.cy = get_num(j, w, "cy", err, 0.0, true);
    sel.radius = get_num(j, w, "radius", err, 0.0, true);
  } else if (kind == "node_set") {
    sel.kind = RegionSelector::Kind::node_set;
    if (!j.contains("nodes") || !j["nodes"].is_array())
      err.add(where + ".region.nodes must be an index array");
    else
      for (const auto& v : j["nodes"]) sel.nodes.push_back(v.get<std::int64_t>());
  } else {
    err.add(where + ".region.kind '" + kind + "' is unknown");
  }
  return sel;
}

RunConfig parse(const json& root, const std::string& text) {
  Violations err;
  RunConfig cfg;
  cfg.config_echo = text;

  if (root.contains("mesh")) {
    const auto& m = root["mesh"];
    cfg.mesh.lx_cm = get_num(m, "mesh", "lx_cm", err, cfg.mesh.lx_cm, true);
    cfg.mesh.ly_cm = get_num(m, "mesh", "ly_cm", err, cfg.mesh.ly_cm, true);
    cfg.mesh.h_cm = get_num(m, "mesh", "h_cm", err, cfg.mesh.h_cm, true);
    cfg.mesh.fiber_angle_rad = get_num(m, "mesh", "fiber_angle_rad", err, 0.0);
    if (!(cfg.mesh.h_cm > 0)) err.add("mesh.h_cm must be positive");
  } else {
    err.add("mesh section is required");
  }

  if (root.contains("fibrosis")) {
    const auto& f = root["fibrosis"];
    cfg.fibrosis.enabled = true;
    cfg.fibrosis.fraction = get_num(f, "fibrosis", "fraction", err, 0.0, true);
    if (!(cfg.fibrosis.fraction >= 0.0 && cfg.fibrosis.fraction <= 1.0))
      err.add("fibrosis.fraction must lie in [0, 1]");
    if (f.contains("seed") && f["seed"].is_number_unsigned())
      cfg.fibrosis.seed = f["seed"].get<std::uint64_t>();
    else if (f.contains("seed") && f["seed"].is_number_integer())
      cfg.fibrosis.seed = static_cast<std::uint64_t>(f["seed"].get<std::int64_t>());
    else
      err.add("fibrosis.seed (integer) is required");
  }

  if (root.contains("diffusion")) {
    const auto& d = root["diffusion"];
    cfg.diffusion.d0_myocyte = get_num(d, "diffusion", "d0_myocyte", err, 0.0017, true);
    cfg.diffusion.d0_fibrotic =
        get_num(d, "diffusion", "d0_fibrotic", err, cfg.diffusion.d0_myocyte);
    cfg.diffusion.rho = get_num(d, "diffusion", "rho", err, 0.25, true);
    if (!(cfg.diffusion.d0_myocyte > 0)) err.add("diffusion.d0_myocyte must be positive");
    if (!(cfg.diffusion.rho > 0 && cfg.diffusion.rho <= 1)) err.add("diffusion.rho must lie in (0, 1]");
  } else {
    err.add("diffusion section is required");
  }

  if (root.contains("models") && root["models"].is_object()) {
    const auto known = registered_model_names();
    for (const auto& [tag, name] : root["models"].items()) {
      if (!name.is_string()) {
        err.add("models." + tag + " must be a model name string");
        continue;
      }
      const std::string n = name.get<std::string>();
      bool ok = false;
      for (const auto& k : known) ok = ok || k == n;
      if (!ok)
        err.add("models." + tag + ": unknown cell model '" + n + "'");
      else
        cfg.models[tag] = n;
    }
    if (cfg.models.empty()) err.add("models must assign at least one tag");
  } else {
    err.add("models section (tag -> model name) is required");
  }

  if (root.contains("pacing")) {
    const auto& p = root["pacing"];
    cfg.pacing.enabled = true;
    cfg.pacing.cycle_length_ms = get_num(p, "pacing", "cycle_length_ms", err, 1000.0);
    cfg.pacing.n_beats = static_cast<int>(get_num(p, "pacing", "n_beats", err, 100.0));
    cfg.pacing.stim_amplitude = get_num(p, "pacing", "stim_amplitude", err, 80.0);
    cfg.pacing.stim_duration_ms = get_num(p, "pacing", "stim_duration_ms", err, 1.0);
    if (cfg.pacing.n_beats < 1) err.add("pacing.n_beats must be >= 1");
    if (p.contains("tags")) {
      if (!p["tags"].is_array())
        err.add("pacing.tags must be an array of tag names");
      else
        for (const auto& t : p["tags"]) cfg.pacing.tags.push_back(t.get<std::string>());
    }
  }

  if (root.contains("scheme")) {
    const auto& s = root["scheme"];
    if (s.contains("name") && s["name"].is_string()) {
      try {
        cfg.scheme.scheme = scheme_from_string(s["name"].get<std::string>());
      } catch (const ValidationError& e) {
        err.add(e.what());
      }
    } else {
      err.add("scheme.name is required (OST, OSTAR or DAETI)");
    }
    // per-scheme defaults: OST 0.01 ms, OSTAR/DAETI 0.1 ms
    const double default_dt = cfg.scheme.scheme == Scheme::OST ? 0.01 : 0.1;
    cfg.scheme.dt_ms = get_num(s, "scheme", "dt_ms", err, default_dt);
    cfg.scheme.t_end_ms = get_num(s, "scheme", "t_end_ms", err, 500.0, true);
    cfg.scheme.k0_up = static_cast<int>(get_num(s, "scheme", "k0_up", err, 5.0));
    cfg.scheme.k0_down = static_cast<int>(get_num(s, "scheme", "k0_down", err, 1.0));
    cfg.scheme.record_interval_ms = get_num(s, "scheme", "record_interval_ms", err, 1.0);
    if (s.contains("strict_substeps")) {
      if (s["strict_substeps"].is_boolean())
        cfg.scheme.strict_substeps = s["strict_substeps"].get<bool>();
      else
        err.add("scheme.strict_substeps must be a boolean");
    }
    try {
      cfg.scheme.validate();
    } catch (const ValidationError& e) {
      err.add(e.what());
    }
  } else if (!root.contains("dts") && !root.contains("threshold")) {
    err.add("scheme section is required for simulation runs");
  }

  if (root.contains("protocol")) {
    if (!root["protocol"].is_array()) {
      err.add("protocol must be an array of stimuli");
    } else {
      int idx = 0;
      for (const auto& s : root["protocol"]) {
        const std::string where = "protocol[" + std::to_string(idx++) + "]";
        StimulusSpec st;
        st.label = s.value("label", "stim" + std::to_string(idx - 1));
        if (!s.contains("region"))
          err.add(where + ".region is required");
        else
          st.region = parse_region(s["region"], where, err);
        st.t_start_ms = get_num(s, where.c_str(), "t_start_ms", err, 0.0, true);
        st.duration_ms = get_num(s, where.c_str(), "duration_ms", err, 1.0, true);
        st.amplitude = get_num(s, where.c_str(), "amplitude", err, 0.0, true);
        if (s.contains("period_ms")) st.period_ms = s["period_ms"].get<double>();
        if (!(st.duration_ms > 0)) err.add(where + ".duration_ms must be positive");
        cfg.protocol.push_back(std::move(st));
      }
    }
  }

  if (root.contains("probes") && root["probes"].is_array()) {
    int idx = 0;
    for (const auto& p : root["probes"]) {
      const std::string where = "probes[" + std::to_string(idx++) + "]";
      ProbeSpec pr;
      pr.name = p.value("name", "probe" + std::to_string(idx));
      pr.x_cm = get_num(p, where.c_str(), "x_cm", err, 0.0, true);
      pr.y_cm = get_num(p, where.c_str(), "y_cm", err, 0.0, true);
      cfg.probes.push_back(std::move(pr));
    }
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    cfg.output.directory = o.value("directory", std::string());
    cfg.output.snapshot_interval_ms = get_num(o, "output", "snapshot_interval_ms", err, 0.0);
    cfg.output.write_maps = o.value("write_maps", true);
    cfg.output.write_vtk_maps = o.value("write_vtk_maps", false);
    cfg.output.lat_threshold_mv = get_num(o, "output", "lat_threshold_mv", err, 0.0);
    cfg.output.dump_operator = o.value("dump_operator", false);
  }

  if (root.contains("dts")) {
    const auto& d = root["dts"];
    cfg.dts.enabled = true;
    if (d.contains("spacings_um") && d["spacings_um"].is_array())
      for (const auto& v : d["spacings_um"]) cfg.dts.spacings_um.push_back(v.get<double>());
    else
      err.add("dts.spacings_um (array of spacings in micrometers) is required");
    cfg.dts.spectral_check = d.value("spectral_check", false);
  }

  if (root.contains("threshold")) {
    const auto& t = root["threshold"];
    cfg.threshold.enabled = true;
    if (t.contains("region"))
      cfg.threshold.region = parse_region(t["region"], "threshold", err);
    else
      err.add("threshold.region is required");
    cfg.threshold.duration_ms = get_num(t, "threshold", "duration_ms", err, 1.0);
    cfg.threshold.initial_guess = get_num(t, "threshold", "initial_guess", err, 1.0);
  }

  if (root.contains("compare")) {
    const auto& c = root["compare"];
    if (c.contains("schemes") && c["schemes"].is_array())
      for (const auto& s : c["schemes"]) cfg.compare.schemes.push_back(s.get<std::string>());
    cfg.compare.reference = c.value("reference", std::string("OST"));
  }

  if (!err.empty()) err.raise();
  return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse(root, json_text);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

} // namespace cardwave
