#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "consent_audit/config.hpp"
#include "consent_audit/corpus.hpp"
#include "consent_audit/fixtures.hpp"
#include "consent_audit/report.hpp"

namespace consent_audit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(ConfigTest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ConfigTest, DigestIsStableAndSensitive) {
  const AuditConfig a;
  EXPECT_EQ(config_digest(a), config_digest(AuditConfig{}));
  EXPECT_EQ(config_digest(a).size(), 64u);
  AuditConfig b;
  b.detection.filter.min_length = 7;
  EXPECT_NE(config_digest(a), config_digest(b));
  AuditConfig c;
  c.analytics.bucket_width = 1000;
  EXPECT_NE(config_digest(a), config_digest(c));
}

TEST(ConfigTest, EmptyDocumentGivesDefaults) {
  EXPECT_EQ(config_from_json(json::object(), {}), AuditConfig{});
}

TEST(ConfigTest, EffectiveConfigRoundTrips) {
  AuditConfig cfg = config_from_json(
      json{{"extra_keywords", {"Ribbon"}}, {"min_length", 8}, {"split_delimiters", "&;|"},
           {"extra_sentinels", {"getWebglFp"}}, {"bucket_width", 25000}, {"top_n", 5}},
      {});
  EXPECT_TRUE(cfg.detection.filter.keyword_blacklist.contains("ribbon"));
  EXPECT_EQ(cfg.detection.filter.min_length, 8u);
  EXPECT_EQ(cfg.detection.filter.split_delimiters, (std::set<char>{'&', ';', '|'}));
  EXPECT_TRUE(cfg.detection.sentinels.contains("getWebglFp"));
  EXPECT_EQ(cfg.analytics.bucket_width, 25000u);
  EXPECT_EQ(config_from_json(config_to_json(cfg), {}), cfg);
}

TEST(ConfigTest, KeywordsFileResolvesRelativeToConfig) {
  const fs::path dir = scratch("config_keywords");
  std::ofstream(dir / "words.txt") << "# mine\nalpha\nBeta\n";
  std::ofstream(dir / "config.json") << R"({"keywords_file": "words.txt", "extreme_tp": 200})";
  const AuditConfig cfg = load_config(dir / "config.json");
  EXPECT_EQ(cfg.detection.filter.keyword_blacklist, (std::set<std::string>{"alpha", "beta"}));
  EXPECT_EQ(cfg.analytics.extreme_third_parties, 200u);
  fs::remove_all(dir);
}

TEST(ConfigTest, BadValuesRejected) {
  EXPECT_THROW(config_from_json(json::array(), {}), SchemaError);
  EXPECT_THROW(config_from_json(json{{"min_length", 0}}, {}), SchemaError);
  EXPECT_THROW(config_from_json(json{{"min_length", "6"}}, {}), SchemaError);
  EXPECT_THROW(config_from_json(json{{"sentinels", {1, 2}}}, {}), SchemaError);
  EXPECT_THROW(config_from_json(json{{"split_delimiters", ""}}, {}), AuditError);
  EXPECT_THROW(config_from_json(json{{"sentinels", json::array()}}, {}), AuditError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
  const fs::path dir = scratch("config_bad");
  std::ofstream(dir / "c.json") << "{not json";
  EXPECT_THROW(load_config(dir / "c.json"), SchemaError);
  fs::remove_all(dir);
}

AuditReport sample_report() {
  const FixtureCorpus c = generate_fixtures(3, 8, FixtureProfile::kEdgeCases);
  return analyze_captures(c.captures, AuditConfig{});
}

TEST(ReportTest, SiteAuditsRoundTrip) {
  std::mt19937_64 rng(6);
  for (const SiteAudits& site : random_corpus(rng, 50)) {
    EXPECT_EQ(site_audits_from_json(to_json(site)), site);
  }
}

TEST(ReportTest, DocumentShape) {
  const AuditReport r = sample_report();
  const json doc = to_json(r);
  EXPECT_EQ(doc.at("tool"), "consent-audit");
  EXPECT_EQ(doc.at("config_digest"), config_digest(r.config));
  EXPECT_EQ(doc.at("sites").size(), 8u);
  EXPECT_EQ(doc.at("corpus").at("sites"), 8);
  EXPECT_EQ(report_to_string(r), report_to_string(sample_report()));
}

TEST(ReportTest, SelfCheckAcceptsGenuineReport) {
  const json doc = to_json(sample_report());
  EXPECT_TRUE(self_check_report(doc).empty());
  EXPECT_TRUE(self_check_report(doc, 0).empty());
}

TEST(ReportTest, SelfCheckCatchesTampering) {
  const json doc = to_json(sample_report());

  std::size_t glamour = 0;
  while (doc["sites"][glamour]["site"] != "glamour.com") ++glamour;

  json counts = doc;
  counts["sites"][glamour]["audits"][0]["third_party_count"] = 100000;
  EXPECT_FALSE(self_check_report(counts).empty());

  json flags = doc;
  flags["sites"][glamour]["audits"][0]["first_party_leak"] = false;
  EXPECT_FALSE(self_check_report(flags).empty());

  json owner = doc;
  owner["sites"][glamour]["audits"][0]["leak_events"][0]["recipient"] = "glamour.com";
  EXPECT_FALSE(self_check_report(owner).empty());

  json corpus = doc;
  corpus["corpus"]["sites"] = 9;
  const auto problems = self_check_report(corpus);
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems[0].find("corpus.sites"), std::string::npos);

  json broken = doc;
  broken["sites"][0]["audits"][0]["consent_action"] = "Maybe";
  EXPECT_FALSE(self_check_report(broken).empty());
}

TEST(ReportTest, CsvTables) {
  const fs::path dir = scratch("csv_tables");
  const auto written = write_csv_tables(sample_report().corpus, dir / "out");
  EXPECT_EQ(written.size(), 10u);
  for (const fs::path& p : written) {
    ASSERT_TRUE(fs::exists(p)) << p;
    const std::string text = read_file(p);
    EXPECT_FALSE(text.empty()) << p;
    EXPECT_EQ(text.back(), '\n') << p;
  }
  const std::string engagement = read_file(dir / "out" / "engagement.csv");
  EXPECT_NE(engagement.find("AcceptAll"), std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace consent_audit
