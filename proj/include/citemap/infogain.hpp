#pragma once

#include <string>
#include <utility>
#include <vector>

#include "citemap/histogram.hpp"

namespace citemap {

/// What to do when the reference puts mass on a bin the input leaves empty.
enum class SmoothingPolicy {
  /// Add 1 / (2 n_samples(Q)) to every bin of Q, then renormalize.
  Additive,
  /// Throw DataError.
  Error,
  /// Drop bins where Q is zero and renormalize P over what remains.
  RestrictToCommonSupport,
};

std::string_view smoothing_name(SmoothingPolicy p);
/// Accepts "additive", "error", "restrict". Throws ConfigError otherwise.
SmoothingPolicy parse_smoothing(std::string_view name);

/// Information gain of a reference distribution P (the discipline) from an
/// input distribution Q (a publisher), in nats scaled by `scale`.
///
/// gain = scale * (cross_entropy - entropy), where cross_entropy is the
/// expected surprise -log Q under P and entropy the expected surprise -log P
/// under P.
struct InfoGainResult {
  double gain = 0.0;
  double cross_entropy = 0.0;  // unexpectedness of P under the estimate Q
  double entropy = 0.0;        // unexpectedness of P under itself
  double scale = 1.0;
  bool smoothing_applied = false;
  std::string reference_label;
  std::string input_label;
};

struct InfoGainOptions {
  double scale = 1.0;
  SmoothingPolicy smoothing = SmoothingPolicy::Additive;
};

/// Kullback-Leibler divergence of `reference` from `input`. The pair is
/// aligned to a common grid first. Throws ConfigError on a negative scale
/// and DataError when either histogram holds no samples.
InfoGainResult information_gain(const CitationHistogram& reference, const CitationHistogram& input,
                                const InfoGainOptions& options = {});

/// Same divergence over raw probability vectors of equal length, with no
/// smoothing: bins where p > 0 and q == 0 yield +inf.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

struct RankFailure {
  std::string label;
  std::string message;
};

struct GainRanking {
  std::vector<InfoGainResult> ranked;  // ascending gain, ties alphabetical
  std::vector<RankFailure> failures;
};

/// Gains of every input against one reference, most similar first. Inputs
/// are evaluated concurrently; the result order does not depend on scheduling.
GainRanking rank_by_gain(const CitationHistogram& reference,
                         const std::vector<std::pair<std::string, CitationHistogram>>& inputs,
                         const InfoGainOptions& options = {});

}  // namespace citemap
