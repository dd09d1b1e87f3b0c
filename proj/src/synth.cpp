#include "citemap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace citemap {

void CitationModel::validate(const std::string& where) const {
  if (!(p_zero >= 0.0 && p_zero <= 1.0)) throw ConfigError(where + ": p_zero must lie in [0, 1]");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ConfigError(where + ": alpha must be >= 1");
  if (max_n < 1) throw ConfigError(where + ": max_n must be >= 1");
  if (max_n > 100'000'000) throw ConfigError(where + ": max_n is unreasonably large");
}

void SynthSpec::validate() const {
  if (n_records == 0) throw ConfigError("synth spec: n_records must be >= 1");
  model.validate("synth spec model");
  if (publishers.empty()) throw ConfigError("synth spec: at least one publisher is required");
  for (const auto& p : publishers) {
    if (p.name.empty() || clean_name(p.name).empty()) throw ConfigError("synth spec: empty publisher name");
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw ConfigError("synth spec: publisher '" + p.name + "' needs a positive weight");
    }
    if (p.model) p.model->validate("synth spec publisher '" + p.name + "'");
  }
  if (disciplines.empty()) throw ConfigError("synth spec: at least one discipline is required");
  for (const auto& d : disciplines) {
    if (!(d.weight > 0.0) || !std::isfinite(d.weight)) {
      throw ConfigError("synth spec: discipline " + std::string(discipline_code(d.discipline)) +
                        " needs a positive weight");
    }
  }
  if (year_min > year_max) throw ConfigError("synth spec: year_min exceeds year_max");
}

namespace {

CitationModel model_from_json(const nlohmann::json& j, const CitationModel& base) {
  CitationModel m = base;
  m.p_zero = j.value("p_zero", m.p_zero);
  m.alpha = j.value("alpha", m.alpha);
  m.max_n = j.value("max_n", m.max_n);
  return m;
}

nlohmann::json model_to_json(const CitationModel& m) {
  return {{"p_zero", m.p_zero}, {"alpha", m.alpha}, {"max_n", m.max_n}};
}

}  // namespace

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  try {
    SynthSpec s;
    s.seed = j.value("seed", s.seed);
    s.n_records = j.value("n_records", s.n_records);
    if (j.contains("model")) s.model = model_from_json(j.at("model"), s.model);
    s.year_min = j.value("year_min", s.year_min);
    s.year_max = j.value("year_max", s.year_max);
    for (const auto& jp : j.value("publishers", nlohmann::json::array())) {
      SynthPublisher p;
      p.name = jp.at("name").get<std::string>();
      p.weight = jp.value("weight", 1.0);
      p.serial = jp.value("serial", false);
      if (jp.contains("model")) p.model = model_from_json(jp.at("model"), s.model);
      s.publishers.push_back(std::move(p));
    }
    if (j.contains("disciplines")) {
      for (const auto& jd : j.at("disciplines")) {
        const auto code = jd.at("code").get<std::string>();
        auto d = parse_discipline_code(code);
        if (!d) throw ConfigError("synth spec: unknown discipline code '" + code + "'");
        s.disciplines.push_back({*d, jd.value("weight", 1.0)});
      }
    } else {
      for (Discipline d : kAllDisciplines) s.disciplines.push_back({d, 1.0});
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
}

nlohmann::json synth_spec_to_json(const SynthSpec& spec) {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["n_records"] = spec.n_records;
  j["model"] = model_to_json(spec.model);
  j["year_min"] = spec.year_min;
  j["year_max"] = spec.year_max;
  j["publishers"] = nlohmann::json::array();
  for (const auto& p : spec.publishers) {
    nlohmann::json jp = {{"name", p.name}, {"weight", p.weight}, {"serial", p.serial}};
    if (p.model) jp["model"] = model_to_json(*p.model);
    j["publishers"].push_back(std::move(jp));
  }
  j["disciplines"] = nlohmann::json::array();
  for (const auto& d : spec.disciplines) {
    j["disciplines"].push_back({{"code", discipline_code(d.discipline)}, {"weight", d.weight}});
  }
  return j;
}

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights) {
  if (weights.empty()) throw ConfigError("sampler needs at least one outcome");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("sampler weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("sampler weights sum to zero");
  cdf_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    acc += w / total;
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::sample(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

double DiscreteSampler::probability(std::size_t i) const {
  return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

namespace {

std::vector<double> power_weights(const CitationModel& m) {
  std::vector<double> w(m.max_n);
  for (std::uint64_t n = 1; n <= m.max_n; ++n) w[n - 1] = std::pow(static_cast<double>(n), -m.alpha);
  return w;
}

}  // namespace

CitationSampler::CitationSampler(const CitationModel& model)
    : p_zero_(model.p_zero), tail_(power_weights(model)) {}

std::uint64_t CitationSampler::sample(SynthRandom& rng) const {
  const double u_zero = rng.uniform();
  const double u_tail = rng.uniform();
  if (u_zero < p_zero_) return 0;
  return tail_.sample(u_tail) + 1;
}

std::vector<CitationRecord> generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<double> dw, pw;
  for (const auto& d : spec.disciplines) dw.push_back(d.weight);
  for (const auto& p : spec.publishers) pw.push_back(p.weight);
  const DiscreteSampler pick_discipline(dw);
  const DiscreteSampler pick_publisher(pw);
  const CitationSampler base(spec.model);
  std::vector<std::optional<CitationSampler>> overrides;
  for (const auto& p : spec.publishers) {
    overrides.push_back(p.model ? std::optional<CitationSampler>(CitationSampler(*p.model))
                                : std::nullopt);
  }

  SynthRandom rng(spec.seed);
  const auto years = static_cast<std::uint64_t>(spec.year_max - spec.year_min + 1);
  std::vector<CitationRecord> out;
  out.reserve(spec.n_records);
  char id[32];
  for (std::uint64_t i = 0; i < spec.n_records; ++i) {
    const auto& disc = spec.disciplines[pick_discipline.sample(rng.uniform())];
    const std::size_t pi = pick_publisher.sample(rng.uniform());
    const auto& pub = spec.publishers[pi];
    const auto& sampler = overrides[pi] ? *overrides[pi] : base;
    CitationRecord r;
    std::snprintf(id, sizeof id, "syn%08llu", static_cast<unsigned long long>(i + 1));
    r.record_id = id;
    r.publisher_raw = pub.name;
    r.publisher = clean_name(pub.name);
    r.citations = sampler.sample(rng);
    r.year = spec.year_min +
             static_cast<int>(std::min<std::uint64_t>(years - 1, static_cast<std::uint64_t>(
                                                                     rng.uniform() * years)));
    r.categories = {std::string(discipline_code(disc.discipline))};
    r.disciplines = {disc.discipline};
    r.has_isbn = !pub.serial;
    r.has_issn = pub.serial;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace citemap
