#ifndef CONSENT_AUDIT_STATISTICS_HPP_
#define CONSENT_AUDIT_STATISTICS_HPP_

#include <map>
#include <span>
#include <utility>

#include "consent_audit/types.hpp"

namespace consent_audit {

struct FiveNumberSummary {
  double min = 0;
  double q25 = 0;
  double median = 0;
  double q75 = 0;
  double max = 0;

  friend bool operator==(const FiveNumberSummary&, const FiveNumberSummary&) = default;
};

// Quantile of already sorted data by linear interpolation between order
// statistics (Hyndman-Fan type 7, the numpy/R default).
double sorted_quantile(std::span<const double> sorted, double p);

// Throws EmptyInputError on an empty sample.
FiveNumberSummary five_number_summary(std::span<const double> values);

struct KsResult {
  double d_statistic = 0;
  double p_value = 1;

  friend bool operator==(const KsResult&, const KsResult&) = default;
};

// Survival function of the Kolmogorov distribution,
// P(K > x) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_sf(double x);

// Asymptotic p-value of a two-sample D statistic for sample sizes n and m.
double ks_asymptotic_p_value(double d, std::size_t n, std::size_t m);

// Two-sided two-sample Kolmogorov-Smirnov test. D is the largest distance
// between the two empirical CDFs. Throws EmptyInputError.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 1;

  friend bool operator==(const LinearFit&, const LinearFit&) = default;
};

// Ordinary least squares with intercept. When y is constant R^2 is 1.
// Throws DegenerateInputError for fewer than two points or a single x value.
LinearFit linear_fit(std::span<const std::pair<double, double>> points);

struct Normalized {
  std::map<ConsentAction, double> percent;
  bool zero_reference = false;  // AcceptAll was 0 (or missing); all outputs are 0

  friend bool operator==(const Normalized&, const Normalized&) = default;
};

// Scales every value so that the AcceptAll value maps to 100.
Normalized normalize_to_accept(const std::map<ConsentAction, double>& values);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_STATISTICS_HPP_
