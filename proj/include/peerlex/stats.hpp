#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peerlex/corpus.hpp"
#include "peerlex/errors.hpp"

namespace peerlex::stats {

class StatsError : public Error {
 public:
  enum class Kind {
    undersized_sample,
    zero_variance,           // pooled variance or non-zero constant diffs
    empty_sample,
    degenerate,              // e.g. every pooled value tied
    invalid_argument,
  };

  StatsError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  double df = 0.0;  // 0 where not applicable
};

double mean(std::span<const double> xs);
// Sample variance, n - 1 denominator.
double variance(std::span<const double> xs);

enum class EffectSize { pooled, paired_dz };

// (mean(a) - mean(b)) / pooled sd.
double cohens_d(std::span<const double> a, std::span<const double> b);
// mean(a - b) / sd(a - b); a and b paired.
double cohens_dz(std::span<const double> a, std::span<const double> b);

// Two-sided one-sample t on paired differences, df = n - 1. All-zero diffs
// yield t = 0, p = 1; a non-zero constant throws zero_variance.
TestResult paired_t(std::span<const double> diffs);

// Largest absolute gap between the two empirical CDFs.
double ks_statistic(std::span<const double> a, std::span<const double> b);
// D with asymptotic Kolmogorov p at effective n = na nb / (na + nb).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// min(1, m p) for each p. Throws invalid_argument when m < 1.
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

// Tie-corrected H over mid-ranks, chi-square p with k - 1 df. Empty groups
// are ignored when counting k.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Ranks 1..N with ties given their average rank.
std::vector<double> mid_ranks(std::span<const double> values);

struct MetricComparison {
  std::optional<double> cohens_d;
  std::optional<TestResult> t;
  std::optional<TestResult> ks;
  std::vector<std::string> notes;  // why a statistic is absent
};

struct CompareOptions {
  EffectSize effect = EffectSize::pooled;
};

// d on (ai_values, oc_means), t on ai - oc, KS on the two post-level samples.
// Needs >= 2 observations; individual failures leave the field empty.
MetricComparison compare_metric(const std::vector<PairedObservation>& observations,
                                const CompareOptions& options = {});

// Special functions backing the p-values.
namespace special {
// I_x(a, b), regularized incomplete beta.
double incomplete_beta(double a, double b, double x);
// Q(a, x) = Gamma(a, x) / Gamma(a), regularized upper incomplete gamma.
double upper_incomplete_gamma(double a, double x);
// Two-sided P(|T| >= |t|) for Student t with df degrees of freedom.
double student_t_two_sided(double t, double df);
double chi_square_sf(double x, double df);
// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_sf(double lambda);
}  // namespace special

}  // namespace peerlex::stats
