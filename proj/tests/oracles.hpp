#pragma once

// Reference computations used only by the tests. None of these call into the
// library code they are checking.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

/// sum p log(p / q) by direct summation in long double, 0 log 0 = 0.
inline long double kl_direct(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    s += static_cast<long double>(p[i]) *
         std::log(static_cast<long double>(p[i]) / static_cast<long double>(q[i]));
  }
  return s;
}

/// -sum p log q in long double.
inline long double cross_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s -= static_cast<long double>(p[i]) * std::log(static_cast<long double>(q[i]));
  }
  return s;
}

/// Two-pass standard deviation; population when `sample` is false.
inline double stddev_two_pass(const std::vector<double>& xs, bool sample = false) {
  long double mean = 0.0L;
  for (double x : xs) mean += x;
  mean /= static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - (sample ? 1 : 0))));
}

/// Random probability vector with every entry > 0, built from integer counts.
inline std::vector<std::uint64_t> random_counts(std::mt19937& rng, std::size_t bins, bool full_support) {
  std::uniform_int_distribution<std::uint64_t> count(full_support ? 1 : 0, 1000);
  std::vector<std::uint64_t> c(bins);
  for (auto& v : c) v = count(rng);
  if (std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 0) c[0] = 1;
  return c;
}

inline std::vector<double> normalize(const std::vector<std::uint64_t>& counts) {
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  std::vector<double> p;
  for (auto c : counts) p.push_back(static_cast<double>(c) / n);
  return p;
}

/// Zipf-distributed draws on [1, max_n] via std::discrete_distribution; an
/// independent sampler from the synthetic corpus generator.
inline std::vector<std::uint64_t> zipf_samples(double alpha, std::uint64_t max_n, std::size_t count,
                                               unsigned seed) {
  std::vector<double> w;
  for (std::uint64_t n = 1; n <= max_n; ++n) w.push_back(std::pow(static_cast<double>(n), -alpha));
  std::discrete_distribution<std::uint64_t> dist(w.begin(), w.end());
  std::mt19937 rng(seed);
  std::vector<std::uint64_t> out(count);
  for (auto& v : out) v = dist(rng) + 1;
  return out;
}

}  // namespace oracle
