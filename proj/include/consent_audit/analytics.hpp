#ifndef CONSENT_AUDIT_ANALYTICS_HPP_
#define CONSENT_AUDIT_ANALYTICS_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "consent_audit/fingerprint.hpp"
#include "consent_audit/leak_detection.hpp"
#include "consent_audit/statistics.hpp"

namespace consent_audit {

// All audits of one site, keyed by consent action.
using SiteAudits = std::map<ConsentAction, SiteAudit>;

struct AnalyticsConfig {
  std::uint64_t bucket_width = 50'000;
  std::size_t extreme_third_parties = 100;
  std::size_t extreme_sync_recipients = 20;
  std::size_t top_n = 5;

  friend bool operator==(const AnalyticsConfig&, const AnalyticsConfig&) = default;
};

using PartyAction = std::pair<Party, ConsentAction>;

struct EngagementRow {
  std::size_t sites = 0;
  std::size_t first_party_leak = 0;
  double first_party_leak_pct = 0;
  std::size_t third_party_sync = 0;
  double third_party_sync_pct = 0;

  friend bool operator==(const EngagementRow&, const EngagementRow&) = default;
};

// Mean number of distinct recipients per leaked ID. Only IDs that reached at
// least one recipient enter the mean; 0 when there are none.
struct RecipientAverage {
  std::size_t ids = 0;
  std::size_t recipients = 0;
  double average = 0;

  friend bool operator==(const RecipientAverage&, const RecipientAverage&) = default;
};

struct PartyShare {
  std::string domain;
  std::size_t learnings = 0;  // (site, id) pairs whose id reached the domain
  double share_pct = 0;

  friend bool operator==(const PartyShare&, const PartyShare&) = default;
};

struct KsComparison {
  ConsentAction first = ConsentAction::kNoAction;
  ConsentAction second = ConsentAction::kRejectAll;
  KsResult result;

  friend bool operator==(const KsComparison&, const KsComparison&) = default;
};

// The comparisons reported for the third-party-count distributions.
inline constexpr std::pair<ConsentAction, ConsentAction> kKsPairs[] = {
    {ConsentAction::kNoAction, ConsentAction::kRejectAll},
    {ConsentAction::kRejectAll, ConsentAction::kAcceptAll},
    {ConsentAction::kAcceptAll, ConsentAction::kNoAction}};

struct ActionSeries {
  std::map<ConsentAction, RecipientAverage> average;
  Normalized normalized;

  friend bool operator==(const ActionSeries&, const ActionSeries&) = default;
};

// Sites whose rank lies in [lo, hi).
struct RankBucket {
  std::uint64_t index = 0;
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  std::size_t sites = 0;
  ActionSeries first_party;
  ActionSeries third_party;

  friend bool operator==(const RankBucket&, const RankBucket&) = default;
};

// Normalized NoAction / RejectAll values against the bucket index.
struct RankTrend {
  std::map<ConsentAction, LinearFit> fits;

  friend bool operator==(const RankTrend&, const RankTrend&) = default;
};

struct CcTldGroup {
  std::string cc_tld;
  std::size_t sites = 0;
  ActionSeries first_party;
  ActionSeries third_party;

  friend bool operator==(const CcTldGroup&, const CcTldGroup&) = default;
};

struct FpTable {
  std::map<ConsentAction, std::size_t> per_action;
  std::map<ConsentAction, double> per_action_pct;  // of sites captured under that action
  std::size_t at_least_one = 0;
  double at_least_one_pct = 0;  // of all sites
  std::map<FpCategory, std::size_t> categories;
  std::map<FpCategory, double> category_pct;  // of sites fingerprinting at least once

  friend bool operator==(const FpTable&, const FpTable&) = default;
};

enum class ExtremeReason { kManyThirdParties, kWideSync, kWideFirstPartyLeak };

std::string_view to_string(ExtremeReason reason);

struct ExtremeFlag {
  std::string site_etld1;
  ExtremeReason reason = ExtremeReason::kManyThirdParties;
  ConsentAction action = ConsentAction::kNoAction;  // first action reaching `measured`
  std::size_t measured = 0;
  std::size_t threshold = 0;

  friend bool operator==(const ExtremeFlag&, const ExtremeFlag&) = default;
  friend auto operator<=>(const ExtremeFlag&, const ExtremeFlag&) = default;
};

struct CorpusStats {
  std::size_t sites = 0;
  std::map<ConsentAction, EngagementRow> engagement;
  std::map<PartyAction, RecipientAverage> avg_recipients;
  std::map<PartyAction, std::vector<PartyShare>> top_third_parties;
  std::map<ConsentAction, FiveNumberSummary> tp_count_summary;
  std::vector<KsComparison> ks_results;
  std::vector<RankBucket> rank_buckets;
  std::map<Party, RankTrend> rank_trends;
  std::vector<CcTldGroup> cctld_groups;
  FpTable fp_table;
  std::vector<ExtremeFlag> extremes;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

// Two-letter country label of a site: the capture's cc_tld when recorded,
// else the last label of its registrable domain. nullopt for generic TLDs.
std::optional<std::string> country_label(const SiteAudits& site);

// Order-insensitive partial aggregate. add() and merge() commute and
// associate exactly (integer state only), so sites can be folded on any
// number of workers and combined in any order.
class CorpusAccumulator {
 public:
  explicit CorpusAccumulator(AnalyticsConfig cfg = {}) : cfg_(cfg) {}

  void add(const SiteAudits& site);
  void merge(const CorpusAccumulator& other);
  // Throws EmptyCorpusError when no site was added.
  CorpusStats finish() const;

  std::size_t sites() const { return sites_; }

  friend bool operator==(const CorpusAccumulator&, const CorpusAccumulator&) = default;

 private:
  struct Tally {
    std::size_t ids = 0;
    std::size_t recipients = 0;
    friend bool operator==(const Tally&, const Tally&) = default;
  };
  struct GroupAcc {
    std::size_t sites = 0;
    std::map<PartyAction, Tally> tallies;
    friend bool operator==(const GroupAcc&, const GroupAcc&) = default;
  };
  struct ActionAcc {
    std::size_t sites = 0;
    std::size_t first_party_leak = 0;
    std::size_t third_party_sync = 0;
    std::size_t fingerprinting = 0;
    std::map<std::size_t, std::size_t> tp_counts;  // value -> multiplicity
    friend bool operator==(const ActionAcc&, const ActionAcc&) = default;
  };

  ActionSeries series(const GroupAcc& group, Party party) const;

  AnalyticsConfig cfg_;
  std::size_t sites_ = 0;
  std::map<ConsentAction, ActionAcc> actions_;
  std::map<PartyAction, Tally> tallies_;
  std::map<PartyAction, std::map<std::string, std::size_t>> learnings_;
  std::map<std::uint64_t, GroupAcc> buckets_;
  std::map<std::string, GroupAcc> countries_;
  std::size_t fp_any_ = 0;
  std::map<FpCategory, std::size_t> fp_categories_;
  std::set<ExtremeFlag> extremes_;
};

// Aggregates a corpus. Throws EmptyCorpusError on an empty corpus.
CorpusStats aggregate(std::span<const SiteAudits> corpus, const AnalyticsConfig& cfg = {});

// Fingerprinting verdicts of one site across the three actions.
FpCategory site_fp_category(const SiteAudits& site);

// Largest recipient count of a single ID of `party` and the first action
// where it occurs.
std::pair<std::size_t, ConsentAction> widest_leak(const SiteAudits& site, Party party);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_ANALYTICS_HPP_
