#include "exitlab/pipeline.hpp"

#include "exitlab/csv.hpp"
#include "exitlab/kramers.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace exitlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  return out;
}

void say(const PipelineOptions& opt, const std::string& msg) {
  if (opt.log) *opt.log << msg << std::endl;
}

/// Runs fn, prefixing any error with the stage name.
template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

std::vector<BoundaryWindow> composite_windows() {
  return {{"Sigma1", 0.0, 2.0}, {"Sigma2", 2.0 + kPi, 4.0 + kPi}};
}

RunConfig figure_config(const std::string& name) {
  RunConfig cfg;
  cfg.windows = composite_windows();
  cfg.target_window = "Sigma2";
  cfg.n_samples = 100000;
  cfg.qsd_particles = 5000;  // 4 chains, 2e4 pooled
  cfg.qsd_chains = 4;
  cfg.seed = 20240601;
  if (name == "res1") {
    cfg.potential = "quadratic-disc-caps";
    cfg.params = ParamMap{{"a", 0.1}};
    cfg.dt = 5e-3;
  } else if (name == "res2") {
    cfg.potential = "quadratic-disc-caps";
    cfg.params = ParamMap{{"a", 0.05}};
    cfg.dt = 2e-3;
  } else if (name == "res3") {
    cfg.potential = "corniche";
    cfg.params = ParamMap{{"delta", 0.05}};
    cfg.dt = 2e-3;
  } else {
    throw Error(ErrorCode::UnknownName, "unknown figure '" + name + "' (expected res1, res2 or res3)");
  }
  return cfg;
}

std::vector<double> figure_time_steps(const std::string& name) {
  if (name == "res3") return {2e-3, 5e-4};
  return {figure_config(name).dt};
}

std::uint64_t exit_seed(std::uint64_t seed, std::size_t k) { return mix64(seed ^ mix64(0xe41700 + k)); }

PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir, const PipelineOptions& opt) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  PipelineResult res;
  res.h_grid = cfg.h_grid;
  if (res.h_grid.empty()) throw Error(ErrorCode::ConfigError, "simulation.h_grid: empty");

  const Landscape land = stage("landscape", [&] { return build_landscape(cfg); });
  std::map<std::string, std::string> meta;
  for (std::size_t k = 0; k < res.h_grid.size(); ++k) {
    meta["qsd_seed_h" + std::to_string(k)] = std::to_string(cfg.qsd(res.h_grid[k], k).seed);
    meta["exit_seed_h" + std::to_string(k)] = std::to_string(exit_seed(cfg.seed, k));
  }
  {
    auto out = open_out(dir / "manifest.yaml");
    out << emit_manifest(cfg, meta);
  }

  say(opt, "[hypotheses] " + cfg.potential);
  res.hypotheses = stage("hypotheses", [&] { return check_hypotheses(land); });
  if (!res.hypotheses.inventory) throw Error(ErrorCode::NoConvergence, "stage hypotheses: no critical inventory");
  const CriticalInventory& inv = *res.hypotheses.inventory;
  {
    auto out = open_out(dir / "inventory.csv");
    write_inventory_csv(inv, out);
  }

  Hypo1Options h1opt;
  h1opt.morse_and_outward = res.hypotheses.entry("H1").pass && res.hypotheses.entry("H3").pass;
  res.hypo1 = stage("hypo1", [&] { return check_hypo1(land, inv, Hypo1Method::automatic, h1opt); });
  res.hypo2 = check_hypo2(inv);
  {
    auto out = open_out(dir / "hypotheses.csv");
    CsvWriter csv(out);
    csv.header({"hypothesis", "pass", "value", "detail"});
    for (const auto& e : res.hypotheses.entries) {
      csv.field(e.id).field(e.pass ? 1 : 0).field(e.value).field(e.detail);
      csv.end_row();
    }
    for (const auto& e : res.hypo1.entries) {
      csv.field("hypo1_z" + std::to_string(e.i)).field(e.verdict == Verdict::pass ? 1 : 0).field(e.lower);
      csv.field(std::string(to_string(e.verdict)) + " via " + e.method + "; threshold " + format_number(e.threshold) +
                "; upper " + format_number(e.upper) + (e.certified ? "; certified" : ""));
      csv.end_row();
    }
    csv.field("hypo2").field(res.hypo2.pass ? 1 : 0).field(res.hypo2.margin).field("f(z1)-f(x0)-(f(zn)-f(z1))");
    csv.end_row();
  }
  say(opt, std::string("[hypo1] ") + std::string(to_string(res.hypo1.overall())) +
               (res.hypo2.pass ? ", hypo2 pass" : ", hypo2 fail"));

  std::vector<std::string> labels;
  for (const auto& w : cfg.windows) labels.push_back(w.label);
  if (!cfg.target_window.empty()) {
    for (std::size_t i = 1; i <= inv.n(); ++i)
      for (const auto& w : cfg.windows)
        if (w.label == cfg.target_window &&
            window_index(land, {w}, inv.z(static_cast<int>(i)).z) == 0)
          res.target_index = static_cast<int>(i);
    if (res.target_index == 0)
      throw Error(ErrorCode::InvalidWindow, "stage analysis: target window contains no boundary minimum");
  }

  std::ofstream summaries = open_out(dir / "summaries.csv");
  CsvWriter sum_csv(summaries);
  sum_csv.header({"h", "x", "window", "count", "n", "p", "se", "tau_mean", "tau_se", "censored", "qsd_converged",
                  "qsd_time"});
  for (std::size_t k = 0; k < res.h_grid.size(); ++k) {
    const double h = res.h_grid[k];
    std::vector<Vec> start;
    double qsd_time = 0.0;
    bool converged = true;
    if (cfg.start == "qsd") {
      const QsdResult q = stage("qsd", [&] { return sample_qsd(land, cfg.qsd(h, k)); });
      auto out = open_out(dir / ("qsd_h" + std::to_string(k) + ".csv"));
      write_qsd_diagnostics_csv(q, out);
      start = q.pooled;
      converged = q.converged;
      qsd_time = q.history.empty() ? 0.0 : q.history.back().time;
      say(opt, "[qsd] h=" + format_number(h) + (converged ? " converged" : " NOT converged") + " at t=" +
                   format_number(qsd_time));
    } else {
      start = {inv.x0};
    }
    SimConfig sim = cfg.sim(h);
    sim.seed = exit_seed(cfg.seed, k);
    const auto events =
        stage("exits", [&] { return batch_exits(start, land, sim, cfg.n_samples, cfg.windows, cfg.workers); });
    if (opt.write_events) {
      auto out = open_out(dir / ("events_h" + std::to_string(k) + ".csv"));
      write_events_csv(events, cfg.windows, land.dimension(), out);
    }
    ExitSummary s = stage("summary", [&] { return summarize(events, labels); });
    auto row = [&](const std::string& label, std::size_t count, double p) {
      sum_csv.field(h).field(2.0 / h).field(label).field(count).field(s.n).field(p);
      sum_csv.field(std::sqrt(p * (1.0 - p) / static_cast<double>(s.n))).field(s.tau_mean).field(s.tau_se);
      sum_csv.field(s.censored).field(converged ? 1 : 0).field(qsd_time);
      sum_csv.end_row();
    };
    for (const auto& w : s.windows) row(w.label, w.count, w.p);
    row("", s.unlabeled, s.p_unlabeled);
    if (!cfg.target_window.empty())
      say(opt, "[exits] h=" + format_number(h) + " p(" + cfg.target_window +
                   ")=" + format_number(s.window(cfg.target_window).p) + " tau_mean=" + format_number(s.tau_mean));
    res.summaries.push_back(std::move(s));
    res.qsd_converged.push_back(converged ? 1 : 0);
  }
  summaries.close();

  if (!cfg.target_window.empty()) {
    const AffineG G = theory_curve_G(inv, res.target_index);
    res.fit = stage("analysis", [&] { return compare_F_G(res.h_grid, res.summaries, cfg.target_window, G); });
    const double gap = std::abs(res.fit->intercept - G.intercept);
    res.intercept_discrepancy = gap > std::max(3.0 * res.fit->intercept_se, 0.15);
    {
      auto out = open_out(dir / "fg_table.csv");
      write_fg_csv(*res.fit, out);
    }
    auto out = open_out(dir / "fg_fit.csv");
    CsvWriter csv(out);
    csv.header({"slope", "slope_se", "intercept", "intercept_se", "theory_slope", "theory_intercept", "hypo1",
                "hypo2", "intercept_discrepancy", "dropped_h"});
    std::string dropped;
    for (double h : res.fit->dropped_h) dropped += (dropped.empty() ? "" : ";") + format_number(h);
    csv.field(res.fit->slope).field(res.fit->slope_se).field(res.fit->intercept).field(res.fit->intercept_se);
    csv.field(G.slope).field(G.intercept).field(to_string(res.hypo1.overall()));
    csv.field(res.hypo2.pass ? "pass" : "fail").field(res.intercept_discrepancy ? 1 : 0).field(dropped);
    csv.end_row();
    say(opt, "[fit] slope " + format_number(res.fit->slope) + " (theory " + format_number(G.slope) +
                 "), intercept " + format_number(res.fit->intercept) + " (theory " + format_number(G.intercept) + ")");
  }
  return res;
}

}  // namespace exitlab
