#include "citemap/infogain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <variant>

#include "citemap/common.hpp"

namespace citemap {

std::string_view smoothing_name(SmoothingPolicy p) {
  switch (p) {
    case SmoothingPolicy::Additive: return "additive";
    case SmoothingPolicy::Error: return "error";
    case SmoothingPolicy::RestrictToCommonSupport: return "restrict";
  }
  return "?";
}

SmoothingPolicy parse_smoothing(std::string_view name) {
  if (name == "additive") return SmoothingPolicy::Additive;
  if (name == "error") return SmoothingPolicy::Error;
  if (name == "restrict") return SmoothingPolicy::RestrictToCommonSupport;
  throw ConfigError("unknown smoothing policy '" + std::string(name) +
                    "' (expected additive, error or restrict)");
}

namespace {

struct Terms {
  double divergence;
  double cross_entropy;
  double entropy;
};

// Sum over p > 0 of p * (r - log1p(r)) with r = (q - p) / p, plus the mass q
// places where p is zero. Each term is nonnegative, so the total is too; it
// equals sum p log(p/q) whenever both vectors sum to one.
Terms divergence_terms(const std::vector<double>& p, const std::vector<double>& q) {
  Terms t{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      t.divergence += q[i];
      continue;
    }
    if (q[i] == 0.0) {
      const double inf = std::numeric_limits<double>::infinity();
      return {inf, inf, t.entropy};
    }
    const double r = (q[i] - p[i]) / p[i];
    t.divergence += p[i] * (r - std::log1p(r));
    t.cross_entropy -= p[i] * std::log(q[i]);
    t.entropy -= p[i] * std::log(p[i]);
  }
  return t;
}

}  // namespace

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DataError("probability vectors differ in length");
  return divergence_terms(p, q).divergence;
}

InfoGainResult information_gain(const CitationHistogram& reference, const CitationHistogram& input,
                                const InfoGainOptions& options) {
  if (!(options.scale >= 0.0)) throw ConfigError("information gain scale must be >= 0");
  if (reference.n_samples() == 0 || input.n_samples() == 0) {
    throw DataError("information gain needs two nonempty histograms ('" + reference.label() +
                    "' vs '" + input.label() + "')");
  }
  const auto [ref, in] = align_support(reference, input);

  std::vector<double> p = ref.probabilities();
  std::vector<double> q = in.probabilities();

  bool uncovered = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && in.count(i) == 0) {
      uncovered = true;
      break;
    }
  }

  InfoGainResult result;
  result.scale = options.scale;
  result.reference_label = reference.label();
  result.input_label = input.label();

  if (uncovered) {
    switch (options.smoothing) {
      case SmoothingPolicy::Error:
        throw DataError("'" + reference.label() + "' has mass on citation bins where '" +
                        input.label() + "' has none");
      case SmoothingPolicy::Additive: {
        const double n = static_cast<double>(in.n_samples());
        const double denom = n + 0.5 * static_cast<double>(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) {
          q[i] = (static_cast<double>(in.count(i)) + 0.5) / denom;
        }
        break;
      }
      case SmoothingPolicy::RestrictToCommonSupport: {
        std::vector<double> p2, q2;
        double kept = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (in.count(i) == 0) continue;
          p2.push_back(static_cast<double>(ref.count(i)));
          q2.push_back(q[i]);
          kept += static_cast<double>(ref.count(i));
        }
        if (kept == 0.0) {
          throw DataError("'" + reference.label() + "' and '" + input.label() +
                          "' share no citation bins");
        }
        for (double& v : p2) v /= kept;
        p = std::move(p2);
        q = std::move(q2);
        break;
      }
    }
    result.smoothing_applied = true;
  }

  const Terms t = divergence_terms(p, q);
  result.gain = options.scale * t.divergence;
  result.cross_entropy = t.cross_entropy;
  result.entropy = t.entropy;
  return result;
}

GainRanking rank_by_gain(const CitationHistogram& reference,
                         const std::vector<std::pair<std::string, CitationHistogram>>& inputs,
                         const InfoGainOptions& options) {
  if (inputs.empty()) throw DataError("rank_by_gain needs at least one input");
  using Outcome = std::variant<InfoGainResult, std::string>;
  std::vector<std::optional<Outcome>> outcomes(inputs.size());

  auto evaluate = [&](std::size_t i) {
    try {
      CitationHistogram q = inputs[i].second;
      q.set_label(inputs[i].first);
      auto r = information_gain(reference, q, options);
      outcomes[i] = Outcome(std::move(r));
    } catch (const std::exception& e) {
      outcomes[i] = Outcome(std::string(e.what()));
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(inputs.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) evaluate(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < inputs.size(); i += workers) evaluate(i);
      });
    }
  }

  GainRanking out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (auto* r = std::get_if<InfoGainResult>(&*outcomes[i])) {
      out.ranked.push_back(std::move(*r));
    } else {
      out.failures.push_back({inputs[i].first, std::get<std::string>(*outcomes[i])});
    }
  }
  std::sort(out.ranked.begin(), out.ranked.end(), [](const auto& a, const auto& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.input_label < b.input_label;
  });
  return out;
}

}  // namespace citemap
