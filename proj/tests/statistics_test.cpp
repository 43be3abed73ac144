#include "consent_audit/statistics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace consent_audit {
namespace {

std::vector<double> random_sample(std::mt19937_64& rng, std::size_t max_n, int range) {
  std::vector<double> v(1 + rng() % max_n);
  for (double& x : v) x = static_cast<double>(rng() % static_cast<std::uint64_t>(range));
  return v;
}

// Largest ECDF gap evaluated at every sample point, counting directly.
double brute_force_d(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> points = a;
  points.insert(points.end(), b.begin(), b.end());
  double d = 0;
  for (double x : points) {
    const auto fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double v) { return v <= x; }));
    const auto fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double v) { return v <= x; }));
    d = std::max(d, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
  }
  return d;
}

TEST(StatisticsTest, FiveNumberSummaryType7) {
  const std::vector<double> v = {3, 1, 4, 1, 5, 9, 2, 6};
  const FiveNumberSummary s = five_number_summary(v);
  EXPECT_DOUBLE_EQ(s.min, 1);
  EXPECT_DOUBLE_EQ(s.q25, 1.75);
  EXPECT_DOUBLE_EQ(s.median, 3.5);
  EXPECT_DOUBLE_EQ(s.q75, 5.25);
  EXPECT_DOUBLE_EQ(s.max, 9);
  const std::vector<double> one = {7};
  EXPECT_EQ(five_number_summary(one), (FiveNumberSummary{7, 7, 7, 7, 7}));
  EXPECT_THROW(five_number_summary(std::vector<double>{}), EmptyInputError);
}

TEST(StatisticsTest, FiveNumberSummaryMatchesSortOracle) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v = random_sample(rng, 60, 200);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto q = [&](double p) {
      const double h = (static_cast<double>(sorted.size()) - 1) * p;
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const FiveNumberSummary s = five_number_summary(v);
    EXPECT_EQ(s.min, sorted.front());
    EXPECT_EQ(s.q25, q(0.25));
    EXPECT_EQ(s.median, q(0.5));
    EXPECT_EQ(s.q75, q(0.75));
    EXPECT_EQ(s.max, sorted.back());
  }
}

TEST(StatisticsTest, KsBasicProperties) {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {6, 7, 8, 9, 10};
  EXPECT_EQ(ks_two_sample(a, a).d_statistic, 0.0);
  EXPECT_EQ(ks_two_sample(a, a).p_value, 1.0);
  EXPECT_EQ(ks_two_sample(a, b).d_statistic, 1.0);
  EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), EmptyInputError);
}

TEST(StatisticsTest, KsMatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_sample(rng, 40, 30);
    const auto b = random_sample(rng, 40, 30);
    const KsResult ab = ks_two_sample(a, b);
    const KsResult ba = ks_two_sample(b, a);
    EXPECT_NEAR(ab.d_statistic, brute_force_d(a, b), 1e-12);
    EXPECT_EQ(ab.d_statistic, ba.d_statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

// Reference values from scipy 1.15: ks_2samp(a, b).statistic and
// kstwobign.sf(sqrt(n m / (n + m)) D).
TEST(StatisticsTest, KsFrozenReferenceValues) {
  struct Case {
    std::vector<double> a, b;
    double d, p;
  };
  const std::vector<Case> cases = {
      {{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, 1.0, 0.013475889875863678},
      {{0.1, 0.4, 0.7, 1.2, 2.5, 3.3}, {0.2, 0.5, 0.9, 1.1, 4.0}, 0.3, 0.9667907604932683},
      {{16, 17, 19, 25, 30, 12, 8, 44}, {17, 19, 21, 33, 40, 12, 9, 51, 60}, 0.3194444444444444,
       0.7804448483241067},
  };
  for (const Case& c : cases) {
    const KsResult r = ks_two_sample(c.a, c.b);
    EXPECT_NEAR(r.d_statistic, c.d, 1e-12);
    EXPECT_NEAR(r.p_value, c.p, 1e-10);
  }
  std::vector<double> a, b;
  for (int i = 0; i < 20; ++i) a.push_back(i);
  for (int i = 0; i < 25; ++i) b.push_back(i + 3);
  const KsResult r = ks_two_sample(a, b);
  EXPECT_NEAR(r.d_statistic, 0.32, 1e-12);
  EXPECT_NEAR(r.p_value, 0.20525679648027775, 1e-10);
}

TEST(StatisticsTest, KolmogorovSurvivalFunction) {
  const std::vector<std::pair<double, double>> ref = {
      {0.05, 1.0},
      {0.2, 0.999999999999495},
      {0.3, 0.9999906941986655},
      {0.5, 0.9639452436648751},
      {0.8, 0.5441424115741981},
      {0.99, 0.2808738392255489},
      {1.0, 0.26999967167735456},
      {1.5, 0.022217962616525127},
      {2.0, 0.0006709252557796953},
      {3.0, 3.045995948942526e-08}};
  for (const auto& [x, p] : ref) EXPECT_NEAR(kolmogorov_sf(x), p, 1e-12) << x;
  EXPECT_EQ(kolmogorov_sf(0), 1.0);
  double prev = 1.0;
  for (double x = 0; x < 4; x += 0.01) {
    const double p = kolmogorov_sf(x);
    EXPECT_LE(p, prev + 1e-15);
    prev = p;
  }
}

TEST(StatisticsTest, LinearFitExactLine) {
  const std::vector<std::pair<double, double>> pts = {{0, 1}, {1, 3}, {2, 5}, {3, 7}};
  const LinearFit f = linear_fit(pts);
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 1, 1e-12);
  EXPECT_NEAR(f.r_squared, 1, 1e-12);
}

TEST(StatisticsTest, LinearFitDegenerate) {
  EXPECT_THROW(linear_fit(std::vector<std::pair<double, double>>{{1, 1}}), DegenerateInputError);
  EXPECT_THROW(linear_fit(std::vector<std::pair<double, double>>{{1, 1}, {1, 2}}),
               DegenerateInputError);
  const LinearFit flat = linear_fit(std::vector<std::pair<double, double>>{{0, 4}, {1, 4}, {5, 4}});
  EXPECT_EQ(flat.slope, 0);
  EXPECT_EQ(flat.intercept, 4);
  EXPECT_EQ(flat.r_squared, 1);
}

TEST(StatisticsTest, LinearFitMatchesNormalEquations) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::pair<double, double>> pts(2 + rng() % 30);
    for (auto& [x, y] : pts) {
      x = static_cast<double>(rng() % 50);
      y = static_cast<double>(rng() % 1000) / 10.0;
    }
    pts[1].first = pts[0].first + 1;  // at least two distinct x
    long double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
      n += 1;
      sx += x;
      sy += y;
      sxx += static_cast<long double>(x) * x;
      sxy += static_cast<long double>(x) * y;
    }
    // [n sx; sx sxx] [b; m] = [sy; sxy]
    const long double det = n * sxx - sx * sx;
    const long double m = (n * sxy - sx * sy) / det;
    const long double b = (sxx * sy - sx * sxy) / det;
    long double ss_res = 0, ss_tot = 0;
    const long double mean = sy / n;
    for (const auto& [x, y] : pts) {
      ss_res += (y - (b + m * x)) * (y - (b + m * x));
      ss_tot += (y - mean) * (y - mean);
    }
    const LinearFit f = linear_fit(pts);
    EXPECT_NEAR(f.slope, static_cast<double>(m), 1e-9);
    EXPECT_NEAR(f.intercept, static_cast<double>(b), 1e-9);
    if (ss_tot > 0) {
      EXPECT_NEAR(f.r_squared, static_cast<double>(1 - ss_res / ss_tot), 1e-9);
    }
    EXPECT_GE(f.r_squared, 0.0);
    EXPECT_LE(f.r_squared, 1.0);
  }
}

TEST(StatisticsTest, NormalizeToAccept) {
  using A = ConsentAction;
  const Normalized n = normalize_to_accept({{A::kNoAction, 2.14}, {A::kRejectAll, 2.49}, {A::kAcceptAll, 3.04}});
  EXPECT_FALSE(n.zero_reference);
  EXPECT_NEAR(n.percent.at(A::kNoAction), 70.4, 0.05);
  EXPECT_NEAR(n.percent.at(A::kRejectAll), 81.9, 0.05);
  EXPECT_EQ(n.percent.at(A::kAcceptAll), 100.0);

  const Normalized z = normalize_to_accept({{A::kNoAction, 1.0}, {A::kAcceptAll, 0.0}});
  EXPECT_TRUE(z.zero_reference);
  EXPECT_EQ(z.percent.at(A::kNoAction), 0.0);
  EXPECT_TRUE(normalize_to_accept({{A::kNoAction, 1.0}}).zero_reference);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double accept = static_cast<double>(1 + rng() % 100000) / 997.0;
    EXPECT_EQ(normalize_to_accept({{A::kAcceptAll, accept}, {A::kNoAction, 1}}).percent.at(A::kAcceptAll),
              100.0);
  }
}

}  // namespace
}  // namespace consent_audit
