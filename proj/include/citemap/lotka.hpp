#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citemap/histogram.hpp"

namespace citemap {

/// How the power law phi(n) = C / n^alpha is estimated from the cited tail.
enum class LotkaMethod {
  /// Least squares of log p against log n, each point weighted by its
  /// observed count (the inverse variance of log p under Poisson noise).
  LogLog,
  /// Unweighted least squares of log p against log n.
  LogLogUnweighted,
  /// C pinned to the observed p(1); alpha from a least-squares line through it.
  Anchored,
  /// Discrete power-law maximum likelihood on [1, largest tail value].
  MaximumLikelihood,
};

std::string_view lotka_method_name(LotkaMethod m);
/// Accepts "loglog", "loglog-unweighted", "anchored", "mle".
LotkaMethod parse_lotka_method(std::string_view name);

struct LotkaOptions {
  LotkaMethod method = LotkaMethod::LogLog;
  /// Tail bins observed fewer times than this are skipped.
  std::uint64_t min_count = 1;
};

struct LotkaFit {
  double c = 0.0;
  double alpha = 0.0;
  double fit_error = 0.0;  // RMS of log-space residuals over the fitted points
  std::size_t n_points = 0;
  LotkaMethod method = LotkaMethod::LogLog;
  /// Observed p(1) when the bin at n = 1 is populated.
  std::optional<double> c_observed;
  /// Set when alpha < 1; the value is reported unclamped.
  bool alpha_out_of_range = false;
};

/// One tail observation: value n >= 1, probability p > 0 and a fit weight.
struct TailPoint {
  double n = 0.0;
  double p = 0.0;
  double weight = 1.0;
};

/// Points with n >= 1 and count >= min_count, excluding the overflow bin.
/// The lower bin edge stands in for n.
std::vector<TailPoint> tail_points(const CitationHistogram& hist, std::uint64_t min_count = 1);

/// Throws DataError when fewer than two usable tail points remain.
LotkaFit fit_lotka(const CitationHistogram& hist, const LotkaOptions& options = {});

/// Fits already-extracted points. MaximumLikelihood treats weights as counts.
LotkaFit fit_lotka_points(std::span<const TailPoint> points, LotkaMethod method = LotkaMethod::LogLog);

/// C / n^alpha. Throws ConfigError when n < 1.
double lotka_predict(const LotkaFit& fit, std::int64_t n);

struct LotkaReportRow {
  std::uint64_t n = 0;
  double observed = 0.0;
  double predicted = 0.0;
  double residual = 0.0;  // observed - predicted
};

/// One row per tail bin with nonzero observed probability.
std::vector<LotkaReportRow> fit_report(const CitationHistogram& hist, const LotkaFit& fit);

void write_lotka_json(std::ostream& out, const LotkaFit& fit, const std::vector<LotkaReportRow>& rows);
void write_lotka_report_csv(std::ostream& out, const std::vector<LotkaReportRow>& rows);

}  // namespace citemap
