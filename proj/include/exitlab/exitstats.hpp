#pragma once

// Estimates and sanity tests on exit-event samples.

#include "exitlab/kramers.hpp"
#include "exitlab/langevin.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace exitlab {

struct WindowEstimate {
  std::string label;
  std::size_t count = 0;
  double p = 0.0;
  double se = 0.0;  ///< sqrt(p (1 - p) / n)
};

struct ExitSummary {
  std::size_t n = 0;  ///< uncensored events
  std::size_t censored = 0;
  std::vector<WindowEstimate> windows;
  std::size_t unlabeled = 0;
  double p_unlabeled = 0.0;
  double tau_mean = 0.0;
  double tau_sd = 0.0;
  double tau_se = 0.0;

  const WindowEstimate& window(const std::string& label) const;
  /// ln of the proportion in the window, -inf for a zero count.
  double F_value(const std::string& label) const;
};

/// Censored events are counted but excluded from proportions and times.
/// Throws AllCensored when no event is usable.
ExitSummary summarize(const std::vector<ExitEvent>& events, const std::vector<std::string>& window_labels);

struct KsResult {
  std::size_t n = 0;
  double D = 0.0;
  double critical = 0.0;  ///< c(alpha) / sqrt(n)
  bool pass = false;
};

/// One-sample Kolmogorov-Smirnov distance to the exponential law with the
/// sample mean plugged in. Using the asymptotic critical value
/// c(alpha) = sqrt(-ln(alpha/2)/2) with an estimated parameter makes the test
/// conservative. Throws TooFewSamples below 100 samples.
KsResult exponentiality_test(const std::vector<double>& taus, double alpha = 0.01);

struct IndependenceResult {
  double correlation = 0.0;
  double z = 0.0;  ///< correlation * sqrt(n)
  bool pass = false;
};

/// Point-biserial correlation between tau and the indicator of the window.
/// Throws DegenerateWindow when the indicator is constant.
IndependenceResult independence_test(const std::vector<ExitEvent>& events, int window);

struct RateEstimate {
  double k = 0.0;
  double se = 0.0;
  double ln_se = 0.0;  ///< standard error of ln k by the delta method
};

/// k = p_window / tau_mean. Throws ZeroMeanTau. A zero count gives infinite errors.
RateEstimate empirical_rate(const ExitSummary& summary, const std::string& label);

struct FGPoint {
  double h = 0.0;
  double x = 0.0;  ///< 2 / h
  std::size_t count = 0;
  std::size_t n = 0;
  double F = 0.0;
  double F_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double G = 0.0;
  bool wilson = false;
};

struct FGFit {
  std::vector<FGPoint> points;
  std::vector<double> dropped_h;  ///< grid points with a zero count
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  AffineG theory;
};

/// F = ln p_target per temperature with a 95% interval (normal approximation,
/// Wilson interval when the count is below 30), and the weighted
/// least-squares line through (2/h, F) with weights 1/var(F).
/// Throws TooFewSamples when fewer than 3 points have nonzero counts.
FGFit compare_F_G(const std::vector<double>& h_grid, const std::vector<ExitSummary>& summaries,
                  const std::string& target_label, const AffineG& theory, bool equal_weights = false);

/// Columns x, F, F_ci_lo, F_ci_hi, G (plus h, count, n).
void write_fg_csv(const FGFit& fit, std::ostream& out);

/// Columns window, count, n, p, se, tau_mean, tau_se, censored.
void write_summary_csv(const ExitSummary& s, std::ostream& out);

}  // namespace exitlab
