#ifndef CONSENT_AUDIT_FIXTURES_HPP_
#define CONSENT_AUDIT_FIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "consent_audit/analytics.hpp"
#include "consent_audit/leak_detection.hpp"
#include "consent_audit/types.hpp"
#include "json.hpp"

namespace consent_audit {

enum class FixtureProfile { kBasic, kEdgeCases };

std::string_view to_string(FixtureProfile profile);
std::optional<FixtureProfile> parse_fixture_profile(std::string_view text);

// Ground truth for one generated capture, known from construction.
struct ExpectedCapture {
  std::string file;
  std::string site_etld1;
  ConsentAction consent_action = ConsentAction::kNoAction;
  std::vector<LeakEvent> leak_events;  // sorted by event_order()
  bool fingerprinting = false;
  std::size_t third_party_count = 0;
  std::string scenario;  // named edge case, empty for ordinary sites

  friend bool operator==(const ExpectedCapture&, const ExpectedCapture&) = default;
};

struct FixtureCorpus {
  std::uint64_t seed = 1;
  FixtureProfile profile = FixtureProfile::kBasic;
  std::vector<SiteCapture> captures;     // three per site, sites in generation order
  std::vector<ExpectedCapture> expected;  // parallel to `captures`
};

// Deterministic synthetic corpus. Every value comes from one mt19937_64
// seeded with `seed`. The edge-cases profile starts with four named sites
// (glamour.com, camer.be, laprovence.com, cnnturk.com) and fills the rest
// with ordinary sites, so it always has at least four.
// Throws AuditError when sites == 0.
FixtureCorpus generate_fixtures(std::uint64_t seed, std::size_t sites, FixtureProfile profile);

nlohmann::json manifest_to_json(const FixtureCorpus& corpus);
std::vector<ExpectedCapture> manifest_from_json(const nlohmann::json& doc);

// One capture file per capture plus manifest.json. Returns the paths
// written. Throws IoError.
std::vector<std::filesystem::path> write_fixture_corpus(const FixtureCorpus& corpus,
                                                        const std::filesystem::path& dir);

// Unscripted inputs for cross-checking against the oracles: small
// vocabularies so that values collide, percent-encoding, JSON and delimited
// cookie values, fragments, opaque referrers, IP and single-label hosts.
SiteCapture random_capture(std::mt19937_64& rng, std::size_t max_requests);

// Internally consistent audits of one synthetic site.
SiteAudits random_site_audits(std::mt19937_64& rng, const std::string& site_etld1);

// 1 .. max_sites sites with distinct names.
std::vector<SiteAudits> random_corpus(std::mt19937_64& rng, std::size_t max_sites);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_FIXTURES_HPP_
