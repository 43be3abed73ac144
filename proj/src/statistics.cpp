#include "consent_audit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace consent_audit {

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptyInputError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

FiveNumberSummary five_number_summary(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("five-number summary of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return FiveNumberSummary{sorted.front(), sorted_quantile(sorted, 0.25),
                           sorted_quantile(sorted, 0.5), sorted_quantile(sorted, 0.75),
                           sorted.back()};
}

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  constexpr double kPi = std::numbers::pi;
  if (x < 1.0) {
    // Small x: the alternating series converges slowly; use the Jacobi
    // theta form of the CDF, sqrt(2 pi)/x * sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
    double cdf = 0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * kPi * kPi / (8.0 * x * x));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * kPi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_asymptotic_p_value(double d, std::size_t n, std::size_t m) {
  const double en = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  return kolmogorov_sf(std::sqrt(en) * d);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptyInputError("KS test needs two nonempty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double n = static_cast<double>(sa.size());
  const double m = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < sa.size() && j < sb.size()) {
    const double t = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == t) ++i;
    while (j < sb.size() && sb[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // Past the end of one sample its ECDF is 1; the other only grows towards 1,
  // so the remaining distances are bounded by the last one computed.
  return KsResult{d, ks_asymptotic_p_value(d, sa.size(), sb.size())};
}

LinearFit linear_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DegenerateInputError("linear fit needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0;
  double my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) throw DegenerateInputError("linear fit needs at least two distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0) {
    fit.r_squared = 1.0;
    return fit;
  }
  double ss_res = 0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

Normalized normalize_to_accept(const std::map<ConsentAction, double>& values) {
  Normalized out;
  const auto it = values.find(ConsentAction::kAcceptAll);
  const double reference = it == values.end() ? 0.0 : it->second;
  out.zero_reference = reference == 0.0;
  for (const auto& [action, value] : values) {
    // Dividing first keeps the reference entry at exactly 100.
    out.percent[action] = out.zero_reference ? 0.0 : value / reference * 100.0;
  }
  return out;
}

}  // namespace consent_audit
