#include "consent_audit/id_extraction.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "consent_audit/strings.hpp"

namespace consent_audit {
namespace {

const FilterConfig& cfg() {
  static const FilterConfig c = FilterConfig::defaults();
  return c;
}

SiteCapture capture_with(std::vector<CookieRecord> cookies) {
  SiteCapture c;
  c.site_url = "https://www.example.fr/";
  c.site_etld1 = "example.fr";
  c.cookies = std::move(cookies);
  return c;
}

CookieRecord cookie(std::string name, std::string value, std::string owner = "example.fr") {
  CookieRecord c;
  c.name = std::move(name);
  c.value = std::move(value);
  c.domain = owner;
  c.set_by = owner;
  c.party = owner == "example.fr" ? Party::kFirst : Party::kThird;
  return c;
}

TEST(IdExtractionTest, KeywordsRejected) {
  for (const char* k : {"homepage", "undefined", "desktop", "not set", "active", "HomePage"}) {
    EXPECT_EQ(filter_reason(k, cfg()), FilterReason::kKeyword) << k;
  }
}

TEST(IdExtractionTest, ShortStringsRejected) {
  for (const char* s : {"", "a", "ab12", "x9y8z"}) {
    EXPECT_FALSE(is_plausible_id(s, cfg())) << s;
  }
  EXPECT_TRUE(is_plausible_id("x9y8z7", cfg()));
}

TEST(IdExtractionTest, TimestampsRejected) {
  for (const char* s : {"15693242", "1693242000", "1693242000123", "2023-03-01",
                        "2023-03-01T10:00:00Z", "2023-03-01T10:00:00.5+02:00",
                        "Wed, 01 Mar 2023 10:00:00 GMT"}) {
    EXPECT_EQ(filter_reason(s, cfg()), FilterReason::kDateOrTimestamp) << s;
  }
  EXPECT_FALSE(is_timestamp_like("1234567"));
  EXPECT_FALSE(is_timestamp_like("12345678901234"));
}

TEST(IdExtractionTest, LocalesRejected) {
  for (const char* s : {"en", "en-US", "fr_FR"}) EXPECT_TRUE(is_locale_tag(s)) << s;
  EXPECT_FALSE(is_locale_tag("en-USA"));
  EXPECT_EQ(filter_reason("de_DE", cfg()), FilterReason::kLocale);
}

TEST(IdExtractionTest, FileAndUrlValuesRejected) {
  EXPECT_EQ(filter_reason("banner.png", cfg()), FilterReason::kFileExtension);
  EXPECT_EQ(filter_reason("vendor.min.JS", cfg()), FilterReason::kFileExtension);
  EXPECT_EQ(filter_reason("www.example.com", cfg()), FilterReason::kUrl);
  EXPECT_EQ(filter_reason("https://example.com/x", cfg()), FilterReason::kUrl);
}

TEST(IdExtractionTest, UuidValuesRetained) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    char buf[40];
    const auto a = rng(), b = rng();
    std::snprintf(buf, sizeof buf, "%08x-%04x-4%03x-%04x-%012llx", static_cast<unsigned>(a),
                  static_cast<unsigned>(a >> 32) & 0xffff, static_cast<unsigned>(a >> 48) & 0xfff,
                  static_cast<unsigned>(b) & 0xffff,
                  static_cast<unsigned long long>(b >> 16) & 0xffffffffffffULL);
    EXPECT_TRUE(is_plausible_id(buf, cfg())) << buf;
  }
}

// Filter decisions against an independent regex formulation.
TEST(IdExtractionTest, MatchesRegexFormulation) {
  const std::regex digits("^[0-9]{8,13}$");
  const std::regex iso("^[0-9]{4}-[0-9]{2}-[0-9]{2}([Tt ][0-9]{2}:[0-9]{2}(:[0-9]{2}(\\.[0-9]+)?)?"
                       "(Z|z|[+-][0-9]{2}:?[0-9]{2})?)?$");
  const std::regex rfc("^(Mon|Tue|Wed|Thu|Fri|Sat|Sun), [0-9]{2} "
                       "(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) [0-9]{4} "
                       "[0-9]{2}:[0-9]{2}:[0-9]{2} GMT$");
  const std::regex locale("^[A-Za-z]{2}([-_][A-Za-z]{2})?$");
  const std::regex url("^(www\\.|https?://)", std::regex::icase);

  std::mt19937_64 rng(7);
  const std::string alphabet = "0123456789abcdefXYZ-_:.T Z+wht/p";
  const std::vector<std::string> seeds = {"2023-03-01", "2023-03-01T10:00", "2023-03-01T10:00:00Z",
                                          "1693242000", "en-US", "www.a", "https://", "a.js",
                                          "Wed, 01 Mar 2023 10:00:00 GMT"};
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    if (rng() % 2 == 0) {
      s = seeds[rng() % seeds.size()];
      // Mutate one position or truncate.
      if (!s.empty() && rng() % 2 == 0) s[rng() % s.size()] = alphabet[rng() % alphabet.size()];
      if (!s.empty() && rng() % 3 == 0) s.resize(rng() % s.size());
    } else {
      for (std::uint64_t k = 0, n = rng() % 16; k < n; ++k) s += alphabet[rng() % alphabet.size()];
    }
    bool expect_reject = cfg().keyword_blacklist.contains(to_lower(s)) ||
                         std::regex_match(s, digits) || std::regex_match(s, iso) ||
                         std::regex_match(s, rfc) || std::regex_match(s, locale) ||
                         std::regex_search(s, url) || s.size() < 6;
    for (const std::string& suffix : cfg().file_extension_suffixes) {
      if (to_lower(s).ends_with(suffix)) expect_reject = true;
    }
    EXPECT_EQ(!is_plausible_id(s, cfg()), expect_reject) << '"' << s << '"';
  }
}

TEST(IdExtractionTest, ExtractSplitsOnDelimiters) {
  const auto values = extract_values("foo={userID};15693242;en-US", cfg());
  const std::vector<std::string> expected = {"foo={userID};15693242;en-US", "foo={userID}",
                                             "15693242", "en-US"};
  EXPECT_EQ(values, expected);
  EXPECT_EQ(filter_reason("15693242", cfg()), FilterReason::kDateOrTimestamp);
  EXPECT_EQ(filter_reason("en-US", cfg()), FilterReason::kLocale);
}

TEST(IdExtractionTest, ExtractJsonLeaves) {
  const auto values =
      extract_values(R"({"id":"abc123456","nested":{"k":["x1y2z3w4", 1234567]},"flag":true})", cfg());
  const std::vector<std::string> expected = {"abc123456", "x1y2z3w4", "1234567"};
  EXPECT_EQ(values, expected);
}

TEST(IdExtractionTest, MalformedJsonTreatedAsText) {
  const auto values = extract_values("{abc;def123", cfg());
  const std::vector<std::string> expected = {"{abc;def123", "{abc", "def123"};
  EXPECT_EQ(values, expected);
}

TEST(IdExtractionTest, ConsentCookiesYieldNothing) {
  for (const char* name : {"euconsent", "eupubconsent", "__cmpconsent", "__cmpiab", "EUCONSENT"}) {
    const auto ids = candidate_ids(capture_with({cookie(name, "BOx9f3kOx9f3kAAABAENAAAAAAAAoAA")}),
                                   cfg());
    EXPECT_TRUE(ids.empty()) << name;
  }
}

TEST(IdExtractionTest, CandidatesDeduplicatedByValueAndOwner) {
  const auto ids = candidate_ids(capture_with({cookie("a", "same-value-1"), cookie("b", "same-value-1"),
                                               cookie("c", "same-value-1", "tracker.com")}),
                                 cfg());
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[0].source_cookie, "a");
  EXPECT_EQ(ids[0].party, Party::kFirst);
  EXPECT_EQ(ids[1].owner, "tracker.com");
  EXPECT_EQ(ids[1].party, Party::kThird);
}

TEST(IdExtractionTest, KeywordListParsing) {
  const auto words = parse_keyword_list("# comment\nHomePage\n\n  spaced  \n");
  EXPECT_EQ(words, (std::set<std::string>{"homepage", "spaced"}));
  EXPECT_GE(parse_keyword_list(bundled_keyword_list()).size(), 50u);
}

TEST(IdExtractionTest, ConfigChecks) {
  FilterConfig c = cfg();
  c.min_length = 0;
  EXPECT_THROW(c.check(), AuditError);
  c = cfg();
  c.split_delimiters.clear();
  EXPECT_THROW(c.check(), AuditError);
}

}  // namespace
}  // namespace consent_audit
