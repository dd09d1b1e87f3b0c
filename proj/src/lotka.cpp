#include "citemap/lotka.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "citemap/common.hpp"

namespace citemap {

std::string_view lotka_method_name(LotkaMethod m) {
  switch (m) {
    case LotkaMethod::LogLog: return "loglog";
    case LotkaMethod::LogLogUnweighted: return "loglog-unweighted";
    case LotkaMethod::Anchored: return "anchored";
    case LotkaMethod::MaximumLikelihood: return "mle";
  }
  return "?";
}

LotkaMethod parse_lotka_method(std::string_view name) {
  if (name == "loglog") return LotkaMethod::LogLog;
  if (name == "loglog-unweighted") return LotkaMethod::LogLogUnweighted;
  if (name == "anchored") return LotkaMethod::Anchored;
  if (name == "mle") return LotkaMethod::MaximumLikelihood;
  throw ConfigError("unknown Lotka fit method '" + std::string(name) +
                    "' (expected loglog, loglog-unweighted, anchored or mle)");
}

std::vector<TailPoint> tail_points(const CitationHistogram& hist, std::uint64_t min_count) {
  std::vector<TailPoint> pts;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist.is_overflow_bin(i) || hist.lower_edge(i) < 1) continue;
    const auto c = hist.count(i);
    if (c == 0 || c < min_count) continue;
    pts.push_back({static_cast<double>(hist.lower_edge(i)), hist.probability(i),
                   static_cast<double>(c)});
  }
  return pts;
}

namespace {

struct Line {
  double intercept;
  double slope;
};

Line weighted_line(std::span<const TailPoint> pts, bool use_weights) {
  double sw = 0, sx = 0, sy = 0;
  for (const auto& p : pts) {
    const double w = use_weights ? p.weight : 1.0;
    sw += w;
    sx += w * std::log(p.n);
    sy += w * std::log(p.p);
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    const double w = use_weights ? p.weight : 1.0;
    const double dx = std::log(p.n) - mx;
    sxx += w * dx * dx;
    sxy += w * dx * (std::log(p.p) - my);
  }
  if (sxx == 0.0) throw DataError("Lotka fit needs at least two distinct citation values");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

// Mean of log k under k^-alpha on [1, n_max].
double model_mean_log(double alpha, long n_max) {
  double z = 0, s = 0;
  for (long k = 1; k <= n_max; ++k) {
    const double lk = std::log(static_cast<double>(k));
    const double w = std::exp(-alpha * lk);
    z += w;
    s += w * lk;
  }
  return s / z;
}

double normalizer(double alpha, long n_max) {
  double z = 0;
  for (long k = 1; k <= n_max; ++k) z += std::pow(static_cast<double>(k), -alpha);
  return z;
}

}  // namespace

LotkaFit fit_lotka_points(std::span<const TailPoint> points, LotkaMethod method) {
  if (points.size() < 2) {
    throw DataError("Lotka fit needs at least 2 cited tail points, got " +
                    std::to_string(points.size()));
  }
  for (const auto& p : points) {
    if (!(p.n >= 1.0) || !(p.p > 0.0) || !(p.weight > 0.0)) {
      throw DataError("Lotka tail points need n >= 1, p > 0 and a positive weight");
    }
  }
  LotkaFit fit;
  fit.method = method;
  fit.n_points = points.size();
  for (const auto& p : points) {
    if (p.n == 1.0) fit.c_observed = p.p;
  }

  switch (method) {
    case LotkaMethod::LogLog:
    case LotkaMethod::LogLogUnweighted: {
      const Line line = weighted_line(points, method == LotkaMethod::LogLog);
      fit.alpha = -line.slope;
      fit.c = std::exp(line.intercept);
      break;
    }
    case LotkaMethod::Anchored: {
      if (!fit.c_observed) throw DataError("anchored Lotka fit needs an observed p(1)");
      const double log_c = std::log(*fit.c_observed);
      double sxx = 0, sxy = 0;
      for (const auto& p : points) {
        const double x = std::log(p.n);
        sxx += p.weight * x * x;
        sxy += p.weight * x * (std::log(p.p) - log_c);
      }
      fit.c = *fit.c_observed;
      fit.alpha = -sxy / sxx;
      break;
    }
    case LotkaMethod::MaximumLikelihood: {
      double total = 0, slog = 0, mass = 0, n_max = 0;
      for (const auto& p : points) {
        total += p.p;
        slog += p.p * std::log(p.n);
        mass += p.p;
        n_max = std::max(n_max, p.n);
      }
      const double target = slog / total;
      const long top = static_cast<long>(n_max);
      // The model's mean log value falls monotonically with alpha.
      double lo = -20.0, hi = 60.0;
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (model_mean_log(mid, top) > target) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      fit.alpha = 0.5 * (lo + hi);
      fit.c = mass / normalizer(fit.alpha, top);
      break;
    }
  }

  double ss = 0;
  for (const auto& p : points) {
    const double r = std::log(p.p) - (std::log(fit.c) - fit.alpha * std::log(p.n));
    ss += r * r;
  }
  fit.fit_error = std::sqrt(ss / static_cast<double>(points.size()));
  fit.alpha_out_of_range = fit.alpha < 1.0;
  return fit;
}

LotkaFit fit_lotka(const CitationHistogram& hist, const LotkaOptions& options) {
  const auto pts = tail_points(hist, options.min_count);
  if (pts.size() < 2) {
    throw DataError("Lotka fit of '" + hist.label() + "' needs at least 2 cited tail bins, found " +
                    std::to_string(pts.size()));
  }
  return fit_lotka_points(pts, options.method);
}

double lotka_predict(const LotkaFit& fit, std::int64_t n) {
  if (n < 1) throw ConfigError("Lotka prediction needs n >= 1, got " + std::to_string(n));
  return fit.c / std::pow(static_cast<double>(n), fit.alpha);
}

std::vector<LotkaReportRow> fit_report(const CitationHistogram& hist, const LotkaFit& fit) {
  std::vector<LotkaReportRow> rows;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist.is_overflow_bin(i) || hist.lower_edge(i) < 1) continue;
    LotkaReportRow row;
    row.n = hist.lower_edge(i);
    row.observed = hist.probability(i);
    row.predicted = lotka_predict(fit, static_cast<std::int64_t>(row.n));
    row.residual = row.observed - row.predicted;
    rows.push_back(row);
  }
  return rows;
}

void write_lotka_json(std::ostream& out, const LotkaFit& fit,
                      const std::vector<LotkaReportRow>& rows) {
  nlohmann::ordered_json o;
  o["C"] = fit.c;
  o["alpha"] = fit.alpha;
  o["fit_error"] = fit.fit_error;
  o["n_points"] = fit.n_points;
  o["method"] = lotka_method_name(fit.method);
  o["C_observed"] = fit.c_observed ? nlohmann::ordered_json(*fit.c_observed) : nlohmann::ordered_json(nullptr);
  o["alpha_out_of_range"] = fit.alpha_out_of_range;
  auto report = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    report.push_back({{"n", r.n}, {"observed", r.observed}, {"predicted", r.predicted},
                      {"residual", r.residual}});
  }
  o["report"] = std::move(report);
  out << o.dump(2) << '\n';
}

void write_lotka_report_csv(std::ostream& out, const std::vector<LotkaReportRow>& rows) {
  out << "n,observed,predicted,residual\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.observed) << ',' << format_double(r.predicted) << ','
        << format_double(r.residual) << '\n';
  }
}

}  // namespace citemap
