#include "consent_audit/public_suffix.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "consent_audit/strings.hpp"

namespace consent_audit {
namespace {

TEST(PublicSuffixTest, CommonHosts) {
  EXPECT_EQ(etld_plus_one("securepubads.g.doubleclick.net"), "doubleclick.net");
  EXPECT_EQ(etld_plus_one("www.google-analytics.com"), "google-analytics.com");
  EXPECT_EQ(etld_plus_one("news.bbc.co.uk"), "bbc.co.uk");
  EXPECT_EQ(etld_plus_one("WWW.Glamour.COM."), "glamour.com");
  EXPECT_EQ(etld_plus_one("camer.be"), "camer.be");
  EXPECT_EQ(etld_plus_one("a.b.c.example.com.br"), "example.com.br");
}

TEST(PublicSuffixTest, WildcardAndException) {
  // *.kawasaki.jp with !city.kawasaki.jp
  EXPECT_EQ(etld_plus_one("a.b.kawasaki.jp"), "a.b.kawasaki.jp");
  EXPECT_EQ(etld_plus_one("x.a.b.kawasaki.jp"), "a.b.kawasaki.jp");
  EXPECT_EQ(etld_plus_one("city.kawasaki.jp"), "city.kawasaki.jp");
  EXPECT_EQ(etld_plus_one("www.city.kawasaki.jp"), "city.kawasaki.jp");
}

TEST(PublicSuffixTest, PrivateSection) {
  EXPECT_EQ(etld_plus_one("user.github.io"), "user.github.io");
  EXPECT_EQ(etld_plus_one("cdn.user.github.io"), "user.github.io");
}

TEST(PublicSuffixTest, UnchangedInputs) {
  EXPECT_EQ(etld_plus_one("192.168.1.20"), "192.168.1.20");
  EXPECT_EQ(etld_plus_one("[::1]"), "::1");
  EXPECT_EQ(etld_plus_one("localhost"), "localhost");
  EXPECT_EQ(etld_plus_one("co.uk"), "co.uk");
  EXPECT_EQ(etld_plus_one(""), "");
}

TEST(PublicSuffixTest, UnknownTldFallsBackToLastLabel) {
  EXPECT_EQ(etld_plus_one("a.b.notatld"), "b.notatld");
}

TEST(PublicSuffixTest, IpLiteral) {
  EXPECT_TRUE(is_ip_literal("10.0.0.1"));
  EXPECT_TRUE(is_ip_literal("::1"));
  EXPECT_FALSE(is_ip_literal("10.0.0"));
  EXPECT_FALSE(is_ip_literal("10.0.0.a"));
}

TEST(PublicSuffixTest, ClassifyParty) {
  EXPECT_EQ(classify_party("www.glamour.com", "glamour.com"), Party::kFirst);
  EXPECT_EQ(classify_party("taboola.com", "camer.be"), Party::kThird);
}

TEST(PublicSuffixTest, FromTextIgnoresCommentsAndTrailingText) {
  const auto list = PublicSuffixList::from_text(
      "// comment\n\ncom\nexample.com  trailing words\n*.wild\n!keep.wild\n");
  EXPECT_EQ(list.rule_count(), 4u);
  EXPECT_EQ(list.registrable_domain("a.b.example.com"), "b.example.com");
  EXPECT_EQ(list.registrable_domain("x.y.z.wild"), "y.z.wild");
  EXPECT_EQ(list.registrable_domain("a.keep.wild"), "keep.wild");
}

// Reference: compare every rule of the list against the host, label by
// label, and apply the prevailing-rule algorithm literally.
struct Rule {
  std::vector<std::string> labels;  // reversed
  bool exception = false;
};

std::vector<std::string> reversed_labels(std::string_view s) {
  std::vector<std::string> out;
  for (std::string_view p : split_any(s, ".")) out.emplace_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Rule> read_rules() {
  std::ifstream in(std::string(CONSENT_AUDIT_DATA_DIR) + "/public_suffix_list.dat");
  std::vector<Rule> rules;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string rule;
    if (!(words >> rule) || rule.starts_with("//")) continue;
    Rule r;
    if (rule[0] == '!') {
      r.exception = true;
      rule = rule.substr(1);
    }
    r.labels = reversed_labels(to_lower(rule));
    rules.push_back(std::move(r));
  }
  return rules;
}

std::string reference_registrable(const std::vector<Rule>& rules, const std::string& host) {
  const auto labels = reversed_labels(host);
  std::size_t suffix_len = 1;  // implicit "*"
  bool have_exception = false;
  for (const Rule& r : rules) {
    if (r.labels.size() > labels.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      if (r.labels[i] != "*" && r.labels[i] != labels[i]) match = false;
    }
    if (!match) continue;
    if (r.exception) {
      suffix_len = r.labels.size() - 1;
      have_exception = true;
    } else if (!have_exception) {
      suffix_len = std::max(suffix_len, r.labels.size());
    }
  }
  if (suffix_len >= labels.size()) return host;
  std::string out;
  for (std::size_t i = suffix_len + 1; i-- > 0;) {
    out += labels[i];
    if (i > 0) out += '.';
  }
  return out;
}

TEST(PublicSuffixTest, MatchesBruteForceOnSampledHosts) {
  const std::vector<Rule> rules = read_rules();
  ASSERT_GT(rules.size(), 5000u);
  const PublicSuffixList& list = active_public_suffix_list();
  std::mt19937_64 rng(20240407);
  const std::vector<std::string> prefixes = {"www", "a", "cdn", "x-y", "city", "foo"};
  for (int i = 0; i < 400; ++i) {
    const Rule& r = rules[rng() % rules.size()];
    std::vector<std::string> labels = r.labels;
    for (std::string& l : labels) {
      if (l == "*") l = prefixes[rng() % prefixes.size()];
    }
    for (std::uint64_t k = 0, n = rng() % 3; k < n; ++k) labels.insert(labels.end(), prefixes[rng() % prefixes.size()]);
    std::string host;
    for (std::size_t j = labels.size(); j-- > 0;) {
      host += labels[j];
      if (j > 0) host += '.';
    }
    EXPECT_EQ(list.registrable_domain(host), reference_registrable(rules, host)) << host;
  }
}

TEST(PublicSuffixTest, IdempotentAndSuffixOfHost) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> labels = {"www", "bbc", "co", "uk", "github", "io",
                                           "com", "example", "kawasaki", "jp", "city"};
  for (int i = 0; i < 500; ++i) {
    std::string host;
    for (std::uint64_t k = 0, n = 1 + rng() % 4; k < n; ++k) {
      if (!host.empty()) host += '.';
      host += labels[rng() % labels.size()];
    }
    const std::string d = etld_plus_one(host);
    EXPECT_EQ(etld_plus_one(d), d) << host;
    EXPECT_TRUE(host == d || host.ends_with("." + d)) << host << " -> " << d;
  }
}

}  // namespace
}  // namespace consent_audit
