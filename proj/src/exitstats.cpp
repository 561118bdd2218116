#include "exitlab/exitstats.hpp"

#include "exitlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace exitlab {

const WindowEstimate& ExitSummary::window(const std::string& label) const {
  for (const auto& w : windows)
    if (w.label == label) return w;
  throw Error(ErrorCode::InvalidParams, "no window labelled '" + label + "'");
}

double ExitSummary::F_value(const std::string& label) const {
  const auto& w = window(label);
  return w.count == 0 ? -std::numeric_limits<double>::infinity() : std::log(w.p);
}

ExitSummary summarize(const std::vector<ExitEvent>& events, const std::vector<std::string>& window_labels) {
  ExitSummary s;
  std::vector<std::size_t> counts(window_labels.size(), 0);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& ev : events) {
    if (ev.censored) {
      ++s.censored;
      continue;
    }
    ++s.n;
    sum += ev.tau;
    sum2 += ev.tau * ev.tau;
    if (ev.window >= 0 && static_cast<std::size_t>(ev.window) < counts.size())
      ++counts[static_cast<std::size_t>(ev.window)];
    else
      ++s.unlabeled;
  }
  if (s.n == 0) throw Error(ErrorCode::AllCensored, "no uncensored exit events");
  const double n = static_cast<double>(s.n);
  for (std::size_t w = 0; w < window_labels.size(); ++w) {
    WindowEstimate e;
    e.label = window_labels[w];
    e.count = counts[w];
    e.p = static_cast<double>(counts[w]) / n;
    e.se = std::sqrt(e.p * (1.0 - e.p) / n);
    s.windows.push_back(e);
  }
  s.p_unlabeled = static_cast<double>(s.unlabeled) / n;
  s.tau_mean = sum / n;
  s.tau_sd = s.n > 1 ? std::sqrt(std::max(0.0, (sum2 - n * s.tau_mean * s.tau_mean) / (n - 1.0))) : 0.0;
  s.tau_se = s.tau_sd / std::sqrt(n);
  return s;
}

KsResult exponentiality_test(const std::vector<double>& taus, double alpha) {
  if (taus.size() < 100) throw Error(ErrorCode::TooFewSamples, "the exponentiality test needs at least 100 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidParams, "alpha must lie in (0, 1)");
  std::vector<double> x = taus;
  std::sort(x.begin(), x.end());
  double mean = 0.0;
  for (double t : x) mean += t;
  mean /= static_cast<double>(x.size());
  KsResult r;
  r.n = x.size();
  const double n = static_cast<double>(r.n);
  if (mean > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double cdf = 1.0 - std::exp(-x[i] / mean);
      r.D = std::max({r.D, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
  } else {
    r.D = 1.0;
  }
  r.critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
  r.pass = r.D < r.critical;
  return r;
}

IndependenceResult independence_test(const std::vector<ExitEvent>& events, int window) {
  double st = 0, stt = 0, sb = 0, stb = 0;
  std::size_t n = 0;
  for (const auto& ev : events) {
    if (ev.censored) continue;
    const double b = ev.window == window ? 1.0 : 0.0;
    st += ev.tau;
    stt += ev.tau * ev.tau;
    sb += b;
    stb += ev.tau * b;
    ++n;
  }
  if (n == 0 || sb == 0.0 || sb == static_cast<double>(n))
    throw Error(ErrorCode::DegenerateWindow, "the window indicator is constant");
  const double nn = static_cast<double>(n);
  const double cov = stb / nn - (st / nn) * (sb / nn);
  const double var_t = stt / nn - (st / nn) * (st / nn);
  const double var_b = sb / nn - (sb / nn) * (sb / nn);
  IndependenceResult r;
  r.correlation = var_t > 0.0 ? cov / std::sqrt(var_t * var_b) : 0.0;
  r.z = r.correlation * std::sqrt(nn);
  r.pass = std::abs(r.z) < 3.0;
  return r;
}

RateEstimate empirical_rate(const ExitSummary& summary, const std::string& label) {
  if (!(summary.tau_mean > 0.0)) throw Error(ErrorCode::ZeroMeanTau, "mean exit time is zero");
  const auto& w = summary.window(label);
  RateEstimate r;
  r.k = w.p / summary.tau_mean;
  if (w.count == 0) {
    r.se = r.ln_se = std::numeric_limits<double>::infinity();
    return r;
  }
  const double rel_p2 = (1.0 - w.p) / (static_cast<double>(summary.n) * w.p);
  const double rel_t = summary.tau_se / summary.tau_mean;
  r.ln_se = std::sqrt(rel_p2 + rel_t * rel_t);
  r.se = r.k * r.ln_se;
  return r;
}

namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

FGFit compare_F_G(const std::vector<double>& h_grid, const std::vector<ExitSummary>& summaries,
                  const std::string& target_label, const AffineG& theory, bool equal_weights) {
  if (h_grid.size() != summaries.size()) throw Error(ErrorCode::InvalidParams, "one summary per grid point expected");
  FGFit fit;
  fit.theory = theory;
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    const auto& w = summaries[k].window(target_label);
    if (w.count == 0) {
      fit.dropped_h.push_back(h_grid[k]);
      continue;
    }
    FGPoint pt;
    pt.h = h_grid[k];
    pt.x = 2.0 / pt.h;
    pt.count = w.count;
    pt.n = summaries[k].n;
    pt.F = std::log(w.p);
    const double n = static_cast<double>(pt.n);
    pt.F_se = std::sqrt((1.0 - w.p) / (n * w.p));
    if (w.count < 30) {
      pt.wilson = true;
      const double z2 = kZ95 * kZ95;
      const double centre = (w.p + z2 / (2 * n)) / (1 + z2 / n);
      const double half = kZ95 / (1 + z2 / n) * std::sqrt(w.p * (1 - w.p) / n + z2 / (4 * n * n));
      pt.ci_lo = std::log(std::max(centre - half, std::numeric_limits<double>::min()));
      pt.ci_hi = std::log(centre + half);
    } else {
      pt.ci_lo = pt.F - kZ95 * pt.F_se;
      pt.ci_hi = pt.F + kZ95 * pt.F_se;
    }
    pt.G = theory(pt.x);
    fit.points.push_back(pt);
  }
  if (fit.points.size() < 3)
    throw Error(ErrorCode::TooFewSamples, "fewer than 3 temperatures with a nonzero target count");

  double s0 = 0, s1 = 0, s2 = 0, sy = 0, sxy = 0;
  for (const auto& pt : fit.points) {
    double w = 1.0;
    if (!equal_weights) w = pt.F_se > 0.0 ? 1.0 / (pt.F_se * pt.F_se) : 1e300;
    s0 += w;
    s1 += w * pt.x;
    s2 += w * pt.x * pt.x;
    sy += w * pt.F;
    sxy += w * pt.x * pt.F;
  }
  const double det = s0 * s2 - s1 * s1;
  if (!(det > 0.0)) throw Error(ErrorCode::InvalidParams, "degenerate temperature grid");
  fit.slope = (s0 * sxy - s1 * sy) / det;
  fit.intercept = (s2 * sy - s1 * sxy) / det;
  // With weights 1/var the inverse normal matrix is the parameter covariance.
  if (!equal_weights) {
    fit.slope_se = std::sqrt(s0 / det);
    fit.intercept_se = std::sqrt(s2 / det);
  }
  return fit;
}

void write_fg_csv(const FGFit& fit, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"x", "F", "F_ci_lo", "F_ci_hi", "G", "h", "count", "n"});
  for (const auto& pt : fit.points) {
    csv.field(pt.x).field(pt.F).field(pt.ci_lo).field(pt.ci_hi).field(pt.G).field(pt.h).field(pt.count).field(pt.n);
    csv.end_row();
  }
}

void write_summary_csv(const ExitSummary& s, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"window", "count", "n", "p", "se", "tau_mean", "tau_se", "censored"});
  auto row = [&](const std::string& label, std::size_t count, double p) {
    csv.field(label).field(count).field(s.n).field(p).field(std::sqrt(p * (1 - p) / static_cast<double>(s.n)));
    csv.field(s.tau_mean).field(s.tau_se).field(s.censored);
    csv.end_row();
  };
  for (const auto& w : s.windows) row(w.label, w.count, w.p);
  row("", s.unlabeled, s.p_unlabeled);
}

}  // namespace exitlab
