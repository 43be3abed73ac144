#include "consent_audit/fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "consent_audit/capture_io.hpp"
#include "consent_audit/corpus.hpp"
#include "consent_audit/oracle.hpp"

namespace consent_audit {
namespace {

namespace fs = std::filesystem;
using A = ConsentAction;

std::set<std::string> recipients_of(const ExpectedCapture& e, const std::string& cookie) {
  std::set<std::string> out;
  for (const LeakEvent& ev : e.leak_events) {
    if (ev.id.source_cookie == cookie) out.insert(ev.recipient);
  }
  return out;
}

const ExpectedCapture& find(const FixtureCorpus& c, const std::string& site, A action) {
  for (const ExpectedCapture& e : c.expected) {
    if (e.site_etld1 == site && e.consent_action == action) return e;
  }
  throw std::runtime_error("no capture for " + site);
}

TEST(FixturesTest, SameSeedSameBytes) {
  const FixtureCorpus a = generate_fixtures(9, 12, FixtureProfile::kEdgeCases);
  const FixtureCorpus b = generate_fixtures(9, 12, FixtureProfile::kEdgeCases);
  ASSERT_EQ(a.captures.size(), b.captures.size());
  for (std::size_t i = 0; i < a.captures.size(); ++i) {
    EXPECT_EQ(serialize_capture(a.captures[i]), serialize_capture(b.captures[i]));
  }
  EXPECT_EQ(manifest_to_json(a).dump(), manifest_to_json(b).dump());
  const FixtureCorpus c = generate_fixtures(10, 12, FixtureProfile::kEdgeCases);
  EXPECT_NE(manifest_to_json(a).dump(), manifest_to_json(c).dump());
}

TEST(FixturesTest, BasicShape) {
  const FixtureCorpus c = generate_fixtures(1, 10, FixtureProfile::kBasic);
  ASSERT_EQ(c.captures.size(), 30u);
  ASSERT_EQ(c.expected.size(), 30u);
  std::set<std::string> files;
  std::map<std::string, std::set<A>> actions;
  for (std::size_t i = 0; i < c.captures.size(); ++i) {
    EXPECT_EQ(c.expected[i].site_etld1, c.captures[i].site_etld1);
    EXPECT_EQ(c.expected[i].consent_action, c.captures[i].consent_action);
    EXPECT_NO_THROW(validate_capture(c.captures[i]));
    files.insert(c.expected[i].file);
    actions[c.captures[i].site_etld1].insert(c.captures[i].consent_action);
  }
  EXPECT_EQ(files.size(), 30u);
  EXPECT_EQ(actions.size(), 10u);
  for (const auto& [site, set] : actions) EXPECT_EQ(set.size(), 3u) << site;
}

TEST(FixturesTest, ZeroSitesRejected) {
  EXPECT_THROW(generate_fixtures(1, 0, FixtureProfile::kBasic), AuditError);
}

TEST(FixturesTest, ProfileNames) {
  for (FixtureProfile p : {FixtureProfile::kBasic, FixtureProfile::kEdgeCases}) {
    EXPECT_EQ(parse_fixture_profile(to_string(p)), p);
  }
  EXPECT_FALSE(parse_fixture_profile("edge"));
}

// Planted ground truth agrees with the detector and with the brute-force
// matcher.
TEST(FixturesTest, ManifestMatchesDetectorAndOracle) {
  const DetectionConfig cfg;
  for (FixtureProfile p : {FixtureProfile::kBasic, FixtureProfile::kEdgeCases}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const FixtureCorpus c = generate_fixtures(seed, 12, p);
      for (std::size_t i = 0; i < c.captures.size(); ++i) {
        const SiteAudit a = audit_capture(c.captures[i], cfg);
        const ExpectedCapture& e = c.expected[i];
        EXPECT_EQ(a.leak_events, e.leak_events) << e.file;
        EXPECT_EQ(a.fingerprinting.detected, e.fingerprinting) << e.file;
        EXPECT_EQ(a.third_party_count, e.third_party_count) << e.file;
        const auto ids = candidate_ids(c.captures[i], cfg.filter);
        auto slow = oracle::detect_leaks(c.captures[i], ids, cfg.filter);
        std::sort(slow.begin(), slow.end(), event_order);
        EXPECT_EQ(slow, e.leak_events) << e.file;
      }
    }
  }
}

TEST(FixturesTest, EdgeScenarios) {
  const FixtureCorpus c = generate_fixtures(1, 4, FixtureProfile::kEdgeCases);
  ASSERT_EQ(c.captures.size(), 12u);
  for (A a : kAllActions) {
    EXPECT_EQ(recipients_of(find(c, "glamour.com", a), "CN_xid").size(), 21u);
  }
  EXPECT_EQ(recipients_of(find(c, "camer.be", A::kRejectAll), "t_gid").size(), 20u);
  EXPECT_TRUE(find(c, "camer.be", A::kNoAction).leak_events.empty());
  EXPECT_TRUE(find(c, "camer.be", A::kAcceptAll).leak_events.empty());
  EXPECT_EQ(find(c, "camer.be", A::kNoAction).third_party_count, 91u);
  EXPECT_EQ(find(c, "camer.be", A::kRejectAll).third_party_count, 131u);
  EXPECT_EQ(find(c, "camer.be", A::kAcceptAll).third_party_count, 94u);
  EXPECT_EQ(find(c, "laprovence.com", A::kNoAction).third_party_count, 97u);
  EXPECT_EQ(find(c, "laprovence.com", A::kRejectAll).third_party_count, 80u);
  EXPECT_EQ(find(c, "laprovence.com", A::kAcceptAll).third_party_count, 159u);
  EXPECT_TRUE(find(c, "cnnturk.com", A::kNoAction).leak_events.empty());
  EXPECT_EQ(recipients_of(find(c, "cnnturk.com", A::kRejectAll), "_ljtrtb_42").size(), 21u);
  EXPECT_EQ(recipients_of(find(c, "cnnturk.com", A::kAcceptAll), "_ljtrtb_42").size(), 21u);
  // The generator fills up to four sites even when asked for fewer.
  EXPECT_EQ(generate_fixtures(1, 1, FixtureProfile::kEdgeCases).captures.size(), 12u);
}

TEST(FixturesTest, ManifestRoundTrip) {
  const FixtureCorpus c = generate_fixtures(4, 6, FixtureProfile::kEdgeCases);
  EXPECT_EQ(manifest_from_json(manifest_to_json(c)), c.expected);
}

TEST(FixturesTest, WrittenCorpusLoads) {
  const fs::path dir = fs::path(::testing::TempDir()) / "fixtures_written";
  fs::remove_all(dir);
  const FixtureCorpus c = generate_fixtures(2, 5, FixtureProfile::kBasic);
  const auto paths = write_fixture_corpus(c, dir);
  EXPECT_EQ(paths.size(), 16u);
  const auto files = list_capture_files(dir);
  ASSERT_EQ(files.size(), 15u);
  for (const fs::path& f : files) EXPECT_NO_THROW(load_capture_file(f));
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest_from_json(manifest), c.expected);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace consent_audit
