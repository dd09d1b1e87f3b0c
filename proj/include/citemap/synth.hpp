#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "citemap/common.hpp"
#include "citemap/corpus.hpp"

namespace citemap {

/// Zero-inflated truncated power law: 0 with probability p_zero, otherwise
/// n in [1, max_n] with probability proportional to n^-alpha.
struct CitationModel {
  double p_zero = 0.8;
  double alpha = 2.0;
  std::uint64_t max_n = 1000;

  void validate(const std::string& where) const;
};

struct SynthPublisher {
  std::string name;
  double weight = 1.0;
  std::optional<CitationModel> model;  // overrides the corpus-wide model
  bool serial = false;  // records carry an ISSN instead of an ISBN
};

struct SynthDiscipline {
  Discipline discipline = Discipline::Science;
  double weight = 1.0;
};

/// Seeded synthetic corpus description. Every record picks a discipline and
/// a publisher independently by weight, then draws its citation count from
/// the publisher's model (or the corpus-wide one).
struct SynthSpec {
  std::uint64_t seed = 1;
  std::uint64_t n_records = 1000;
  CitationModel model;
  std::vector<SynthPublisher> publishers;
  std::vector<SynthDiscipline> disciplines;
  int year_min = 2005;
  int year_max = 2011;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne Twister
/// draw. std::mt19937_64's sequence is fixed by the standard, so corpora are
/// identical on every platform.
class SynthRandom {
 public:
  explicit SynthRandom(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a finite set of weighted outcomes 0..n-1.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights);
  std::size_t sample(double u) const;
  double probability(std::size_t i) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

/// Citation count draws for one model.
class CitationSampler {
 public:
  explicit CitationSampler(const CitationModel& model);
  std::uint64_t sample(SynthRandom& rng) const;

 private:
  double p_zero_;
  DiscreteSampler tail_;
};

/// Exactly spec.n_records records, deterministic in the spec. Throws ConfigError on an invalid spec.
std::vector<CitationRecord> generate(const SynthSpec& spec);

}  // namespace citemap
