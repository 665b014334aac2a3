#include "peerlex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace peerlex::stats {

namespace {

using Kind = StatsError::Kind;

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) throw StatsError(Kind::invalid_argument, "sample contains a non-finite value");
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw StatsError(Kind::empty_sample, "mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw StatsError(Kind::undersized_sample, "variance needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw StatsError(Kind::undersized_sample, "Cohen's d needs at least 2 values per group");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0);
  if (!(pooled > 0.0)) throw StatsError(Kind::zero_variance, "pooled variance is zero");
  return (mean(a) - mean(b)) / std::sqrt(pooled);
}

double cohens_dz(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StatsError(Kind::invalid_argument, "d_z needs paired samples");
  if (a.size() < 2) throw StatsError(Kind::undersized_sample, "d_z needs at least 2 pairs");
  std::vector<double> diffs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  const double var = variance(diffs);
  if (!(var > 0.0)) throw StatsError(Kind::zero_variance, "paired differences have zero variance");
  return mean(diffs) / std::sqrt(var);
}

TestResult paired_t(std::span<const double> diffs) {
  if (diffs.size() < 2) throw StatsError(Kind::undersized_sample, "paired t needs at least 2 pairs");
  require_finite(diffs);
  TestResult r;
  r.n = diffs.size();
  r.df = static_cast<double>(diffs.size() - 1);
  const double var = variance(diffs);
  if (!(var > 0.0)) {
    if (std::all_of(diffs.begin(), diffs.end(), [](double d) { return d == 0.0; })) {
      r.statistic = 0.0;
      r.p_value = 1.0;
      return r;
    }
    throw StatsError(Kind::zero_variance, "paired differences are a non-zero constant");
  }
  r.statistic = mean(diffs) / std::sqrt(var / static_cast<double>(diffs.size()));
  r.p_value = special::student_t_two_sided(r.statistic, r.df);
  return r;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError(Kind::empty_sample, "KS needs two non-empty samples");
  require_finite(a);
  require_finite(b);
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    // Step past every copy of the smallest remaining value on both sides.
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  TestResult r;
  r.statistic = ks_statistic(a, b);
  r.n = a.size() + b.size();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ne = na * nb / (na + nb);
  r.p_value = special::kolmogorov_sf(std::sqrt(ne) * r.statistic);
  return r;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  if (m < 1) throw StatsError(Kind::invalid_argument, "Bonferroni family size must be >= 1");
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw StatsError(Kind::invalid_argument, "p-value outside [0,1]");
    out.push_back(std::min(1.0, static_cast<double>(m) * p));
  }
  return out;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  std::vector<const std::vector<double>*> used;
  for (const auto& g : groups)
    if (!g.empty()) used.push_back(&g);
  if (used.size() < 2) throw StatsError(Kind::undersized_sample, "Kruskal-Wallis needs 2 non-empty groups");

  std::vector<double> pooled;
  for (const auto* g : used) {
    require_finite(*g);
    pooled.insert(pooled.end(), g->begin(), g->end());
  }
  const double n = static_cast<double>(pooled.size());
  const auto ranks = mid_ranks(pooled);

  // Between-group sum of squares of mean ranks; algebraically equal to the
  // textbook sum R_i^2 / n_i form but free of its cancellation.
  const double grand = 0.5 * (n + 1.0);
  double between = 0.0;
  std::size_t offset = 0;
  for (const auto* g : used) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) sum += ranks[offset + k];
    const double size = static_cast<double>(g->size());
    const double dev = sum / size - grand;
    between += size * dev * dev;
    offset += g->size();
  }

  auto sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double correction = 1.0 - ties / (n * n * n - n);
  if (!(correction > 0.0)) throw StatsError(Kind::degenerate, "every pooled value is tied");

  TestResult r;
  r.statistic = 12.0 * between / (n * (n + 1.0)) / correction;
  r.n = pooled.size();
  r.df = static_cast<double>(used.size() - 1);
  r.p_value = special::chi_square_sf(r.statistic, r.df);
  return r;
}

MetricComparison compare_metric(const std::vector<PairedObservation>& observations,
                                const CompareOptions& options) {
  MetricComparison out;
  if (observations.size() < 2) {
    out.notes.push_back("fewer than 2 paired posts");
    return out;
  }
  std::vector<double> ai;
  std::vector<double> oc;
  std::vector<double> diffs;
  ai.reserve(observations.size());
  oc.reserve(observations.size());
  diffs.reserve(observations.size());
  for (const auto& o : observations) {
    ai.push_back(o.ai_value);
    oc.push_back(o.oc_mean);
    diffs.push_back(o.ai_value - o.oc_mean);
  }
  try {
    out.cohens_d = options.effect == EffectSize::pooled ? cohens_d(ai, oc) : cohens_dz(ai, oc);
  } catch (const StatsError& e) {
    out.notes.push_back(std::string("d: ") + e.what());
  }
  try {
    out.t = paired_t(diffs);
  } catch (const StatsError& e) {
    out.notes.push_back(std::string("t: ") + e.what());
  }
  try {
    out.ks = ks_two_sample(ai, oc);
  } catch (const StatsError& e) {
    out.notes.push_back(std::string("ks: ") + e.what());
  }
  return out;
}

}  // namespace peerlex::stats
