// exitlab: command-line front end.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

#include "exitlab/agmon.hpp"
#include "exitlab/config.hpp"
#include "exitlab/csv.hpp"
#include "exitlab/exitstats.hpp"
#include "exitlab/kmc.hpp"
#include "exitlab/kramers.hpp"
#include "exitlab/oracle1d.hpp"
#include "exitlab/pipeline.hpp"
#include "exitlab/qsd.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

using namespace exitlab;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;  ///< file (or directory for multi-file commands); "-" or empty is stdout
};

void add_common(CLI::App* cmd, Common& c, const char* out_help = "output CSV file (default: stdout)") {
  cmd->add_option("--config,-c", c.config, "YAML run configuration");
  cmd->add_option("--set", c.overrides, "override a key, e.g. --set simulation.dt=1e-3")->take_all();
  cmd->add_option("--out,-o", c.out, out_help);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  return cfg;
}

/// Writes through fn to the chosen file or to stdout.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  fn(out);
}

std::string point_string(const Vec& p) {
  std::string s;
  for (Eigen::Index k = 0; k < p.size(); ++k) s += (k ? ";" : "") + format_number(p[k]);
  return s;
}

Vec parse_point(const std::vector<double>& v, int dim, const char* flag) {
  if (static_cast<int>(v.size()) != dim)
    throw Error(ErrorCode::ConfigError, std::string(flag) + ": expected " + std::to_string(dim) + " coordinates");
  Vec p(dim);
  for (int k = 0; k < dim; ++k) p[k] = v[static_cast<std::size_t>(k)];
  return p;
}

CriticalInventory inventory_of(const Landscape& land) {
  HypothesisReport rep = check_hypotheses(land);
  if (!rep.inventory) throw Error(ErrorCode::NoConvergence, "no critical inventory");
  return *rep.inventory;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownName:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidTemperature:
    case ErrorCode::InvalidWindow:
    case ErrorCode::IoError:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exit events of overdamped Langevin dynamics: simulation, QSD sampling and Eyring-Kramers checks"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // reproduce-figure
  Common fig_c;
  std::string fig_name;
  double scale_samples = 1.0, scale_particles = 1.0;
  bool write_events = false;
  int fig_workers = 0;
  auto* fig = app.add_subcommand("reproduce-figure", "run a built-in figure recipe (res1, res2, res3)");
  fig->add_option("name", fig_name, "res1 | res2 | res3")->required();
  fig->add_option("--set", fig_c.overrides, "override a key of the recipe")->take_all();
  fig->add_option("--out,-o", fig_c.out, "output directory (default: $EXITLAB_OUTPUT_DIR or exitlab_out)");
  fig->add_option("--scale-samples", scale_samples, "multiply the number of exit samples");
  fig->add_option("--scale-particles", scale_particles, "multiply the number of Fleming-Viot particles");
  fig->add_option("--workers,-j", fig_workers, "worker threads");
  fig->add_flag("--write-events", write_events, "also write the raw event logs");

  // rates
  Common rates_c;
  std::vector<double> rates_h;
  auto* rates = app.add_subcommand("rates", "Eyring-Kramers rates, lambda_h and exit probabilities");
  add_common(rates, rates_c);
  rates->add_option("--h-grid", rates_h, "temperatures")->delimiter(',');

  // agmon
  Common ag_c;
  std::vector<double> ag_from, ag_to;
  double ag_res = 0.02, ag_rin = 1.0 / 3.0, ag_rout = 2.0 / 3.0;
  std::string ag_method = "dijkstra";
  bool ag_hypo1 = false;
  auto* agmon = app.add_subcommand("agmon", "Agmon distance bounds and the hypo1 check");
  add_common(agmon, ag_c);
  agmon->add_option("--from", ag_from, "first point (or annulus centre)")->delimiter(',');
  agmon->add_option("--to", ag_to, "second point")->delimiter(',');
  agmon->add_option("--resolution", ag_res, "mesh spacing");
  agmon->add_option("--method", ag_method, "dijkstra | annulus | agmonz1 | auto");
  agmon->add_option("--r-inner", ag_rin, "annulus inner radius");
  agmon->add_option("--r-outer", ag_rout, "annulus outer radius");
  agmon->add_flag("--check-hypo1", ag_hypo1, "report hypo1 for every boundary minimum");

  // exit-dist
  Common ed_c;
  std::vector<std::string> ed_events;
  std::vector<double> ed_h;
  std::string ed_target;
  auto* ed = app.add_subcommand("exit-dist", "summaries and the (x, F, G) table from event logs");
  add_common(ed, ed_c, "output directory");
  ed->add_option("--events", ed_events, "event CSV files, one per temperature")->required()->delimiter(',');
  ed->add_option("--h-grid", ed_h, "temperature of each event file")->delimiter(',');
  ed->add_option("--target", ed_target, "window label for F (default analysis.target_window)");

  // qsd-sample
  Common qs_c;
  double qs_h = 0.0;
  auto* qs = app.add_subcommand("qsd-sample", "Fleming-Viot sampling of the quasi-stationary distribution");
  add_common(qs, qs_c, "output directory");
  qs->add_option("--h", qs_h, "temperature (default simulation.h)");

  // simulate-exits
  Common se_c;
  double se_h = 0.0;
  auto* se = app.add_subcommand("simulate-exits", "exit events from the QSD or from x0");
  add_common(se, se_c);
  se->add_option("--h", se_h, "temperature (default simulation.h)");

  // kmc-run
  Common km_c;
  double km_h = 0.0, km_tend = 1e6;
  std::size_t km_runs = 1;
  std::vector<double> km_return;
  auto* km = app.add_subcommand("kmc-run", "kinetic Monte Carlo on the Eyring-Kramers rate table");
  add_common(km, km_c, "output directory");
  km->add_option("--h", km_h, "temperature (default simulation.h)");
  km->add_option("--t-end", km_tend, "time horizon");
  km->add_option("--runs", km_runs, "independent trajectories");
  km->add_option("--return-rates", km_return, "rates back to state 0, one per neighbour")->delimiter(',');

  // oracle1d
  std::vector<double> or_coeffs;
  double or_z1 = 0, or_z2 = 0, or_x = 0, or_h = 0;
  auto* orc = app.add_subcommand("oracle1d", "exact and Laplace exit probabilities on an interval");
  orc->add_option("--f-coeffs", or_coeffs, "polynomial coefficients c0,c1,... of f")->required()->delimiter(',');
  orc->add_option("--z1", or_z1)->required();
  orc->add_option("--z2", or_z2)->required();
  orc->add_option("--x", or_x)->required();
  orc->add_option("--h", or_h)->required();

  // check-hypotheses
  Common ch_c;
  auto* ch = app.add_subcommand("check-hypotheses", "H1-H3, hypo1 and hypo2 with the critical inventory");
  add_common(ch, ch_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fig) {
      RunConfig base = figure_config(fig_name);
      for (const auto& o : fig_c.overrides) apply_override(base, o);
      base.n_samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(base.n_samples * scale_samples)));
      base.qsd_particles =
          std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(base.qsd_particles * scale_particles)));
      if (fig_workers > 0) base.workers = fig_workers;
      const std::string root = resolve_output_dir(base, fig_c.out);
      const auto dts = figure_time_steps(fig_name);
      PipelineOptions opt;
      opt.write_events = write_events;
      opt.log = &std::cerr;
      for (double dt : dts) {
        RunConfig cfg = base;
        std::string dir = root;
        if (dts.size() > 1) {
          cfg.dt = dt;
          dir = (std::filesystem::path(root) / ("dt_" + format_number(dt))).string();
        }
        const PipelineResult r = run_pipeline(cfg, dir, opt);
        std::cout << dir << "\n";
        if (r.hypo1.overall() != Verdict::pass)
          std::cerr << "warning: hypo1 is " << to_string(r.hypo1.overall())
                    << ", the prefactor in G is not expected to hold\n";
        if (r.intercept_discrepancy) std::cerr << "warning: fitted intercept departs from G\n";
      }
      return 0;
    }

    if (*orc) {
      const Interval1D iv = Interval1D::from_polynomial(or_coeffs, or_z1, or_z2);
      const double exact = exact_exit_prob(iv, or_x, or_h);
      CsvWriter csv(std::cout);
      csv.header({"exact", "asymptotic", "regime"});
      if (or_x == or_z1) {
        csv.field(exact).field(0.0).field("boundary");
      } else {
        const LaplaceResult lap = laplace_asymptotic(iv, or_x, or_h);
        csv.field(exact).field(lap.value).field(to_string(lap.regime));
      }
      csv.end_row();
      return 0;
    }

    if (*rates) {
      const RunConfig cfg = resolve(rates_c);
      const Landscape land = build_landscape(cfg);
      const CriticalInventory inv = inventory_of(land);
      if (rates_h.empty()) rates_h = {cfg.h};
      emit(rates_c.out, [&](std::ostream& out) {
        CsvWriter csv(out);
        csv.header({"h", "i", "barrier", "prefactor", "k_theory", "lambda_h", "p_exit_theory"});
        for (double h : rates_h) {
          const TheoryContext ctx(inv, h);
          for (int i = 1; i <= static_cast<int>(inv.n()); ++i) {
            csv.field(h).field(i).field(barrier(ctx, i)).field(rate_prefactor(ctx, i)).field(rate(ctx, i));
            csv.field(principal_eigenvalue(ctx)).field(exit_probability(ctx, i));
            csv.end_row();
          }
        }
      });
      return 0;
    }

    if (*agmon) {
      const RunConfig cfg = resolve(ag_c);
      const Landscape land = build_landscape(cfg);
      const int d = land.dimension();
      if (ag_hypo1) {
        const CriticalInventory inv = inventory_of(land);
        Hypo1Options opt;
        opt.r_inner = ag_rin;
        opt.r_outer = ag_rout;
        opt.resolution = ag_res;
        const HypothesisReport hr = check_hypotheses(land);
        opt.morse_and_outward = hr.entry("H1").pass && hr.entry("H3").pass;
        const std::string m = ag_method == "dijkstra" && !agmon->count("--method") ? "auto" : ag_method;
        const Hypo1Report rep = check_hypo1(land, inv, parse_hypo1_method(m), opt);
        emit(ag_c.out, [&](std::ostream& out) {
          CsvWriter csv(out);
          csv.header({"i", "threshold", "lower", "upper", "verdict", "certified", "method", "detail"});
          for (const auto& e : rep.entries) {
            csv.field(e.i).field(e.threshold).field(e.lower).field(e.upper).field(to_string(e.verdict));
            csv.field(e.certified ? 1 : 0).field(e.method).field(e.detail);
            csv.end_row();
          }
        });
        return 0;
      }
      const Hypo1Method method = parse_hypo1_method(ag_method);
      if (method == Hypo1Method::annulus) {
        const CriticalInventory inv = inventory_of(land);
        Vec z = ag_from.empty() ? inv.z(static_cast<int>(inv.n())).z : parse_point(ag_from, d, "--from");
        // B: boundary samples outside the basin of the boundary minimum nearest to z.
        int own = 1;
        for (int i = 1; i <= static_cast<int>(inv.n()); ++i)
          if ((inv.z(i).z - z).norm() < (inv.z(own).z - z).norm()) own = i;
        std::vector<Vec> B;
        if (d == 2) {
          const std::size_t n = 4096;
          const double L = land.domain->boundary_length();
          const auto labels = boundary_basin_partition(land, inv, n);
          for (std::size_t k = 0; k < n; ++k)
            if (labels[k] != inv.z(own).basin_id)
              B.push_back(land.domain->boundary_frame(L * static_cast<double>(k) / n).point);
        } else {
          for (int i = 1; i <= static_cast<int>(inv.n()); ++i)
            if (i != own) B.push_back(inv.z(i).z);
        }
        const AnnulusBound ab = lower_bound_annulus(land, z, ag_rin, ag_rout, B);
        emit(ag_c.out, [&](std::ostream& out) {
          CsvWriter csv(out);
          csv.header({"x", "y", "lower", "upper", "witness_length", "resolution", "alpha", "inf_g"});
          csv.field(point_string(z)).field("basin complement").field(ab.value);
          csv.field(std::numeric_limits<double>::quiet_NaN()).field(0.0).field(ag_res).field(ab.alpha).field(ab.inf_g);
          csv.end_row();
        });
        return 0;
      }
      if (method != Hypo1Method::dijkstra)
        throw Error(ErrorCode::ConfigError, "--method " + ag_method + " needs --check-hypo1");
      const Vec x = parse_point(ag_from, d, "--from");
      const Vec y = parse_point(ag_to, d, "--to");
      const DistanceBound b = distance_upper(land, x, y, ag_res);
      emit(ag_c.out, [&](std::ostream& out) {
        CsvWriter csv(out);
        csv.header({"x", "y", "lower", "upper", "witness_length", "resolution"});
        csv.field(point_string(x)).field(point_string(y)).field(b.lower).field(b.upper).field(b.witness_length);
        csv.field(ag_res);
        csv.end_row();
      });
      return 0;
    }

    if (*ed) {
      const RunConfig cfg = resolve(ed_c);
      const std::string dir = resolve_output_dir(cfg, ed_c.out);
      std::filesystem::create_directories(dir);
      std::vector<ExitSummary> sums;
      std::vector<std::string> labels;
      for (const auto& w : cfg.windows) labels.push_back(w.label);
      for (std::size_t k = 0; k < ed_events.size(); ++k) {
        const EventLog log = read_events_csv(ed_events[k]);
        const auto& use = labels.empty() ? log.labels : labels;
        sums.push_back(summarize(log.events, use));
        std::ofstream out(std::filesystem::path(dir) / ("summary_" + std::to_string(k) + ".csv"), std::ios::binary);
        write_summary_csv(sums.back(), out);
      }
      const std::string target_label = ed_target.empty() ? cfg.target_window : ed_target;
      if (ed_h.empty() && cfg.h_grid.size() == ed_events.size()) ed_h = cfg.h_grid;
      if (!target_label.empty()) {
        if (ed_h.size() != ed_events.size())
          throw Error(ErrorCode::ConfigError, "--h-grid: one temperature per event file is required");
        const Landscape land = build_landscape(cfg);
        const CriticalInventory inv = inventory_of(land);
        int target = 0;
        for (const auto& w : cfg.windows)
          if (w.label == target_label)
            for (int i = 1; i <= static_cast<int>(inv.n()); ++i)
              if (window_index(land, {w}, inv.z(i).z) == 0) target = i;
        if (target == 0) throw Error(ErrorCode::InvalidWindow, "target window contains no boundary minimum");
        const FGFit fit = compare_F_G(ed_h, sums, target_label, theory_curve_G(inv, target));
        std::ofstream out(std::filesystem::path(dir) / "fg_table.csv", std::ios::binary);
        write_fg_csv(fit, out);
      }
      std::cout << dir << "\n";
      return 0;
    }

    if (*qs) {
      const RunConfig cfg = resolve(qs_c);
      const Landscape land = build_landscape(cfg);
      const double h = qs_h > 0 ? qs_h : cfg.h;
      const QsdResult r = sample_qsd(land, cfg.qsd(h));
      const std::string dir = resolve_output_dir(cfg, qs_c.out);
      std::filesystem::create_directories(dir);
      {
        std::ofstream out(std::filesystem::path(dir) / "qsd_diagnostics.csv", std::ios::binary);
        write_qsd_diagnostics_csv(r, out);
      }
      std::ofstream out(std::filesystem::path(dir) / "qsd_particles.csv", std::ios::binary);
      CsvWriter csv(out);
      std::vector<std::string> header;
      for (int k = 0; k < land.dimension(); ++k) header.push_back("x" + std::to_string(k));
      csv.header(header);
      for (const Vec& p : r.pooled) {
        for (int k = 0; k < land.dimension(); ++k) csv.field(p[k]);
        csv.end_row();
      }
      std::ofstream(std::filesystem::path(dir) / "manifest.yaml", std::ios::binary)
          << emit_manifest(cfg, {{"command", "qsd-sample"}, {"h", format_number(h)}});
      std::cout << dir << "\n";
      if (!r.converged) {
        std::cerr << "NoConvergence: R_max " << r.history.back().R_max << " at t=" << r.history.back().time << "\n";
        return 3;
      }
      return 0;
    }

    if (*se) {
      const RunConfig cfg = resolve(se_c);
      const Landscape land = build_landscape(cfg);
      const double h = se_h > 0 ? se_h : cfg.h;
      std::vector<Vec> start;
      if (cfg.start == "qsd") {
        const QsdResult q = sample_qsd(land, cfg.qsd(h));
        if (!q.converged) std::cerr << "warning: QSD sampling did not converge\n";
        start = q.pooled;
      } else {
        start = {inventory_of(land).x0};
      }
      const auto events = batch_exits(start, land, cfg.sim(h), cfg.n_samples, cfg.windows, cfg.workers);
      emit(se_c.out, [&](std::ostream& out) { write_events_csv(events, cfg.windows, land.dimension(), out); });
      return 0;
    }

    if (*km) {
      const RunConfig cfg = resolve(km_c);
      const Landscape land = build_landscape(cfg);
      const CriticalInventory inv = inventory_of(land);
      const double h = km_h > 0 ? km_h : cfg.h;
      std::vector<std::string> names;
      for (std::size_t i = 1; i <= inv.n(); ++i) names.push_back("beyond_z" + std::to_string(i));
      const RateTable table = table_from_landscape(TheoryContext(inv, h), names, km_return);
      const std::string dir = resolve_output_dir(cfg, km_c.out);
      std::filesystem::create_directories(dir);
      {
        std::ofstream out(std::filesystem::path(dir) / "rate_table.csv", std::ios::binary);
        write_rate_table_csv(table, out);
      }
      std::ofstream out(std::filesystem::path(dir) / "trajectories.csv", std::ios::binary);
      CsvWriter csv(out);
      csv.header({"run", "t", "state"});
      for (std::size_t r = 0; r < km_runs; ++r) {
        const KmcTrajectory traj = run(table, 0, km_tend, cfg.seed, r);
        for (std::size_t n = 0; n < traj.states.size(); ++n) {
          csv.field(r).field(traj.times[n]).field(table.label(traj.states[n]));
          csv.end_row();
        }
      }
      std::cout << dir << "\n";
      return 0;
    }

    if (*ch) {
      const RunConfig cfg = resolve(ch_c);
      const Landscape land = build_landscape(cfg);
      const HypothesisReport hr = check_hypotheses(land);
      emit(ch_c.out, [&](std::ostream& out) {
        CsvWriter csv(out);
        csv.header({"hypothesis", "pass", "value", "detail"});
        for (const auto& e : hr.entries) {
          csv.field(e.id).field(e.pass ? 1 : 0).field(e.value).field(e.detail);
          csv.end_row();
        }
        if (hr.inventory) {
          Hypo1Options opt;
          opt.morse_and_outward = hr.entry("H1").pass && hr.entry("H3").pass;
          const Hypo1Report rep = check_hypo1(land, *hr.inventory, Hypo1Method::automatic, opt);
          for (const auto& e : rep.entries) {
            csv.field("hypo1_z" + std::to_string(e.i)).field(e.verdict == Verdict::pass ? 1 : 0).field(e.lower);
            csv.field(std::string(to_string(e.verdict)) + " via " + e.method);
            csv.end_row();
          }
          const Hypo2Result h2 = check_hypo2(*hr.inventory);
          csv.field("hypo2").field(h2.pass ? 1 : 0).field(h2.margin).field("");
          csv.end_row();
        }
      });
      if (hr.inventory && !ch_c.out.empty() && ch_c.out != "-") {
        const auto inv_path = std::filesystem::path(ch_c.out).replace_filename("inventory.csv");
        std::ofstream out(inv_path, std::ios::binary);
        write_inventory_csv(*hr.inventory, out);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
