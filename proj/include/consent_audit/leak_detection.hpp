#ifndef CONSENT_AUDIT_LEAK_DETECTION_HPP_
#define CONSENT_AUDIT_LEAK_DETECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "consent_audit/fingerprint.hpp"
#include "consent_audit/id_extraction.hpp"
#include "consent_audit/types.hpp"

namespace consent_audit {

// Where in a request an identifier was observed. Declaration order is the
// event sort order.
enum class Channel : std::uint8_t { kUrlParam = 0, kBody = 1, kReferrer = 2 };

inline constexpr Channel kAllChannels[] = {Channel::kUrlParam, Channel::kBody, Channel::kReferrer};

std::string_view to_string(Channel channel);
std::optional<Channel> parse_channel(std::string_view text);

class ChannelSet {
 public:
  void insert(Channel c) { bits_ |= bit(c); }
  bool contains(Channel c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }

  friend bool operator==(ChannelSet, ChannelSet) = default;

 private:
  static std::uint8_t bit(Channel c) { return static_cast<std::uint8_t>(1u << static_cast<int>(c)); }
  std::uint8_t bits_ = 0;
};

// One delivery of a candidate ID to a registrable domain other than its owner.
struct LeakEvent {
  CandidateId id;
  std::string recipient;
  Channel channel = Channel::kUrlParam;
  std::size_t request_index = 0;

  friend bool operator==(const LeakEvent&, const LeakEvent&) = default;
};

// Event order: request index, channel, then identifier.
bool event_order(const LeakEvent& a, const LeakEvent& b);

struct DetectionConfig {
  FilterConfig filter = FilterConfig::defaults();
  std::set<std::string> sentinels = default_sentinels();

  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
};

// Per-site, per-consent-action verdicts.
struct SiteAudit {
  std::string site_etld1;
  ConsentAction consent_action = ConsentAction::kNoAction;
  std::optional<std::uint64_t> rank;
  std::optional<std::string> cc_tld;
  std::vector<LeakEvent> leak_events;
  bool first_party_leak = false;
  bool third_party_sync = false;
  std::map<CandidateId, std::set<std::string>> recipients_per_id;
  // Distinct third parties: script hosts (all hosts when requests carry no
  // resource types) plus every non-site recipient of a leak.
  std::size_t third_party_count = 0;
  FingerprintFinding fingerprinting;

  friend bool operator==(const SiteAudit&, const SiteAudit&) = default;
};

// Path segments, then query fragments split on every delimiter, plus the
// value of each "k=v" fragment. Each token also appears percent-decoded when
// decoding changes it. Empty tokens are dropped, first occurrence kept.
// Throws ParseError for an invalid URL.
std::vector<std::string> tokenize_url(std::string_view url, const std::set<char>& delimiters);

ChannelSet find_id_in_request(const CandidateId& id, const HttpRequest& request,
                              const FilterConfig& cfg);

// All leak events of `ids` (produced from `capture`), sorted by event_order().
std::vector<LeakEvent> detect_leaks(const SiteCapture& capture, std::span<const CandidateId> ids,
                                    const FilterConfig& cfg);

// Distinct registrable domains other than the site's among script requests,
// or among all requests when no request carries a resource type.
std::size_t third_party_count(const SiteCapture& capture);

// Full audit of one capture.
SiteAudit audit_capture(const SiteCapture& capture, const DetectionConfig& cfg);

// Audits the (at most three) captures of one site, keyed by consent action.
// Throws InconsistentSiteError when the captures disagree on the site or
// repeat an action.
std::map<ConsentAction, SiteAudit> audit_site(std::span<const SiteCapture> captures,
                                              const DetectionConfig& cfg);

// recipients_per_id, first_party_leak and third_party_sync derived from events.
void summarize_events(SiteAudit& audit);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_LEAK_DETECTION_HPP_
