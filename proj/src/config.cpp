#include "exitlab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace exitlab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ConfigError, path + ": " + why);
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(path, "expected a map");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(path, "cannot parse '" + node.Scalar() + "'");
  }
}

template <class T>
void read_into(const YAML::Node& section, const char* key, const std::string& path, T& out) {
  if (const YAML::Node n = section[key]) out = read<T>(n, path + "." + key);
}

std::vector<double> read_array(const YAML::Node& node, const std::string& path) {
  std::vector<double> out;
  if (node.IsScalar()) {
    out.push_back(read<double>(node, path));
    return out;
  }
  if (!node.IsSequence()) fail(path, "expected a number or an array of numbers");
  for (std::size_t k = 0; k < node.size(); ++k) out.push_back(read<double>(node[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be positive");
}

}  // namespace

SimConfig RunConfig::sim(double temperature) const {
  SimConfig s;
  s.dt = dt;
  s.h = temperature;
  s.seed = seed;
  s.max_steps = max_steps;
  return s;
}

QsdConfig RunConfig::qsd(double temperature, std::uint64_t seed_offset) const {
  QsdConfig q;
  q.n_particles = qsd_particles;
  q.n_chains = qsd_chains;
  q.dt = dt;
  q.h = temperature;
  q.seed = mix64(seed ^ mix64(0x51d0 + seed_offset));
  q.r_threshold = r_threshold;
  q.snapshot_stride = snapshot_stride;
  q.max_time = qsd_max_time;
  q.workers = workers;
  return q;
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    fail("<document>", std::string("YAML syntax error: ") + e.what());
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  check_keys(root, "", {"potential", "domain", "simulation", "qsd", "windows", "analysis", "output", "meta"});

  if (const YAML::Node p = root["potential"]) {
    check_keys(p, "potential", {"name", "params"});
    read_into(p, "name", "potential", cfg.potential);
    cfg.params = ParamMap{};
    if (const YAML::Node params = p["params"]) {
      if (!params.IsMap()) fail("potential.params", "expected a map");
      for (const auto& kv : params) {
        const auto key = kv.first.as<std::string>();
        const auto values = read_array(kv.second, "potential.params." + key);
        if (kv.second.IsScalar())
          cfg.params.set(key, values.front());
        else
          cfg.params.set(key, values);
      }
    }
  }
  if (const YAML::Node d = root["domain"]) {
    check_keys(d, "domain", {"kind"});
    read_into(d, "kind", "domain", cfg.domain_kind);
  }
  if (const YAML::Node s = root["simulation"]) {
    check_keys(s, "simulation", {"dt", "h", "seed", "max_steps", "n_samples", "workers", "h_grid", "start"});
    read_into(s, "dt", "simulation", cfg.dt);
    read_into(s, "h", "simulation", cfg.h);
    read_into(s, "seed", "simulation", cfg.seed);
    read_into(s, "max_steps", "simulation", cfg.max_steps);
    read_into(s, "n_samples", "simulation", cfg.n_samples);
    read_into(s, "workers", "simulation", cfg.workers);
    read_into(s, "start", "simulation", cfg.start);
    if (const YAML::Node g = s["h_grid"]) cfg.h_grid = read_array(g, "simulation.h_grid");
  }
  if (const YAML::Node q = root["qsd"]) {
    check_keys(q, "qsd", {"n_particles", "n_chains", "r_threshold", "snapshot_stride", "max_time"});
    read_into(q, "n_particles", "qsd", cfg.qsd_particles);
    read_into(q, "n_chains", "qsd", cfg.qsd_chains);
    read_into(q, "r_threshold", "qsd", cfg.r_threshold);
    read_into(q, "snapshot_stride", "qsd", cfg.snapshot_stride);
    read_into(q, "max_time", "qsd", cfg.qsd_max_time);
  }
  if (const YAML::Node w = root["windows"]) {
    if (!w.IsSequence()) fail("windows", "expected a list of {label, s_begin, s_end}");
    for (std::size_t k = 0; k < w.size(); ++k) {
      const std::string path = "windows[" + std::to_string(k) + "]";
      check_keys(w[k], path, {"label", "s_begin", "s_end"});
      BoundaryWindow win;
      if (!w[k]["label"] || !w[k]["s_begin"] || !w[k]["s_end"]) fail(path, "label, s_begin and s_end are required");
      win.label = read<std::string>(w[k]["label"], path + ".label");
      win.s_begin = read<double>(w[k]["s_begin"], path + ".s_begin");
      win.s_end = read<double>(w[k]["s_end"], path + ".s_end");
      cfg.windows.push_back(win);
    }
  }
  if (const YAML::Node a = root["analysis"]) {
    check_keys(a, "analysis", {"target_window"});
    read_into(a, "target_window", "analysis", cfg.target_window);
  }
  if (const YAML::Node o = root["output"]) {
    check_keys(o, "output", {"dir"});
    read_into(o, "dir", "output", cfg.output_dir);
  }
  if (const YAML::Node m = root["meta"]; m && !m.IsMap()) fail("meta", "expected a map");

  positive(cfg.dt, "simulation.dt");
  positive(cfg.h, "simulation.h");
  if (cfg.max_steps < 1) fail("simulation.max_steps", "must be at least 1");
  if (cfg.n_samples < 1) fail("simulation.n_samples", "must be at least 1");
  if (cfg.workers < 1) fail("simulation.workers", "must be at least 1");
  for (std::size_t k = 0; k < cfg.h_grid.size(); ++k) positive(cfg.h_grid[k], "simulation.h_grid[" + std::to_string(k) + "]");
  if (cfg.start != "qsd" && cfg.start != "x0") fail("simulation.start", "must be 'qsd' or 'x0'");
  if (cfg.qsd_particles < 2) fail("qsd.n_particles", "must be at least 2");
  if (cfg.qsd_chains < 2) fail("qsd.n_chains", "must be at least 2");
  if (cfg.snapshot_stride < 1) fail("qsd.snapshot_stride", "must be at least 1");
  positive(cfg.qsd_max_time, "qsd.max_time");
  if (!cfg.target_window.empty()) {
    bool found = false;
    for (const auto& w : cfg.windows) found = found || w.label == cfg.target_window;
    if (!found) fail("analysis.target_window", "no window labelled '" + cfg.target_window + "'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_manifest(const RunConfig& cfg, const std::map<std::string, std::string>& meta) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.potential;
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : cfg.params.items()) {
    out << YAML::Key << k << YAML::Value;
    if (v.size() == 1 && k != "coeffs")
      out << v.front();
    else
      out << YAML::Flow << v;
  }
  out << YAML::EndMap << YAML::EndMap;
  if (!cfg.domain_kind.empty())
    out << YAML::Key << "domain" << YAML::Value << YAML::BeginMap << YAML::Key << "kind" << YAML::Value
        << cfg.domain_kind << YAML::EndMap;
  out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << cfg.dt;
  out << YAML::Key << "h" << YAML::Value << cfg.h;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "max_steps" << YAML::Value << cfg.max_steps;
  out << YAML::Key << "n_samples" << YAML::Value << cfg.n_samples;
  out << YAML::Key << "workers" << YAML::Value << cfg.workers;
  out << YAML::Key << "h_grid" << YAML::Value << YAML::Flow << cfg.h_grid;
  out << YAML::Key << "start" << YAML::Value << cfg.start;
  out << YAML::EndMap;
  out << YAML::Key << "qsd" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_particles" << YAML::Value << cfg.qsd_particles;
  out << YAML::Key << "n_chains" << YAML::Value << cfg.qsd_chains;
  out << YAML::Key << "r_threshold" << YAML::Value << cfg.r_threshold;
  out << YAML::Key << "snapshot_stride" << YAML::Value << cfg.snapshot_stride;
  out << YAML::Key << "max_time" << YAML::Value << cfg.qsd_max_time;
  out << YAML::EndMap;
  out << YAML::Key << "windows" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : cfg.windows)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "label" << YAML::Value << w.label << YAML::Key << "s_begin"
        << YAML::Value << w.s_begin << YAML::Key << "s_end" << YAML::Value << w.s_end << YAML::EndMap;
  out << YAML::EndSeq;
  if (!cfg.target_window.empty())
    out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap << YAML::Key << "target_window"
        << YAML::Value << cfg.target_window << YAML::EndMap;
  if (!cfg.output_dir.empty())
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value
        << cfg.output_dir << YAML::EndMap;
  out << YAML::Key << "meta" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << kVersion;
  for (const auto& [k, v] : meta) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    fail(assignment, "overrides take the form section.key=value");
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  YAML::Node root = YAML::Load(emit_manifest(cfg));
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception&) {
    fail(section + "." + key, "cannot parse override value");
  }
  if (section == "potential" && key.rfind("params.", 0) == 0)
    root["potential"]["params"][key.substr(7)] = value;
  else
    root[section][key] = value;
  std::stringstream buf;
  buf << root;
  cfg = parse_config(buf.str());
}

Landscape build_landscape(const RunConfig& cfg) {
  Landscape land = make_builtin_landscape(cfg.potential, cfg.params);
  if (!cfg.domain_kind.empty() && cfg.domain_kind != to_string(land.domain->kind()))
    fail("domain.kind", "'" + cfg.domain_kind + "' does not match the domain of '" + cfg.potential + "' (" +
                            std::string(to_string(land.domain->kind())) + ")");
  return land;
}

std::string resolve_output_dir(const RunConfig& cfg, const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("EXITLAB_OUTPUT_DIR"); env && *env) return env;
  return "exitlab_out";
}

}  // namespace exitlab
