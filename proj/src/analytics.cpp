#include "consent_audit/analytics.hpp"

#include <algorithm>
#include <cctype>

#include "consent_audit/strings.hpp"

namespace consent_audit {

std::string_view to_string(ExtremeReason reason) {
  switch (reason) {
    case ExtremeReason::kManyThirdParties:
      return "ManyThirdParties";
    case ExtremeReason::kWideSync:
      return "WideSync";
    case ExtremeReason::kWideFirstPartyLeak:
      return "WideFirstPartyLeak";
  }
  return "ManyThirdParties";
}

namespace {

std::optional<std::uint64_t> site_rank(const SiteAudits& site) {
  for (const auto& [action, audit] : site) {
    if (audit.rank) return audit.rank;
  }
  return std::nullopt;
}

bool is_country_code(std::string_view label) {
  return label.size() == 2 && std::isalpha(static_cast<unsigned char>(label[0])) &&
         std::isalpha(static_cast<unsigned char>(label[1]));
}

}  // namespace

std::optional<std::string> country_label(const SiteAudits& site) {
  if (site.empty()) return std::nullopt;
  std::string label;
  for (const auto& [action, audit] : site) {
    if (audit.cc_tld) {
      label = to_lower(*audit.cc_tld);
      break;
    }
  }
  if (label.empty()) {
    const std::string& etld1 = site.begin()->second.site_etld1;
    const auto dot = etld1.rfind('.');
    label = to_lower(dot == std::string::npos ? etld1 : etld1.substr(dot + 1));
  }
  if (!is_country_code(label)) return std::nullopt;
  return label;
}

FpCategory site_fp_category(const SiteAudits& site) {
  std::map<ConsentAction, bool> flags;
  for (const auto& [action, audit] : site) flags[action] = audit.fingerprinting.detected;
  return classify_fp_category(flags);
}

std::pair<std::size_t, ConsentAction> widest_leak(const SiteAudits& site, Party party) {
  std::size_t best = 0;
  ConsentAction where = ConsentAction::kNoAction;
  for (const auto& [action, audit] : site) {
    for (const auto& [id, recipients] : audit.recipients_per_id) {
      if (id.party == party && recipients.size() > best) {
        best = recipients.size();
        where = action;
      }
    }
  }
  return {best, where};
}

void CorpusAccumulator::add(const SiteAudits& site) {
  if (site.empty()) return;
  ++sites_;
  const auto rank = site_rank(site);
  const auto country = country_label(site);
  GroupAcc* bucket = nullptr;
  if (rank && cfg_.bucket_width > 0) {
    bucket = &buckets_[(*rank - 1) / cfg_.bucket_width];
    ++bucket->sites;
  }
  GroupAcc* group = nullptr;
  if (country) {
    group = &countries_[*country];
    ++group->sites;
  }

  std::size_t max_tp = 0;
  ConsentAction max_tp_action = ConsentAction::kNoAction;
  for (const auto& [action, audit] : site) {
    ActionAcc& acc = actions_[action];
    ++acc.sites;
    acc.first_party_leak += audit.first_party_leak ? 1 : 0;
    acc.third_party_sync += audit.third_party_sync ? 1 : 0;
    acc.fingerprinting += audit.fingerprinting.detected ? 1 : 0;
    ++acc.tp_counts[audit.third_party_count];
    if (audit.third_party_count > max_tp) {
      max_tp = audit.third_party_count;
      max_tp_action = action;
    }
    for (const auto& [id, recipients] : audit.recipients_per_id) {
      if (recipients.empty()) continue;
      const PartyAction key{id.party, action};
      for (Tally* t : {&tallies_[key], bucket ? &bucket->tallies[key] : nullptr,
                       group ? &group->tallies[key] : nullptr}) {
        if (t == nullptr) continue;
        ++t->ids;
        t->recipients += recipients.size();
      }
      auto& per_domain = learnings_[key];
      for (const std::string& r : recipients) ++per_domain[r];
    }
  }

  const FpCategory category = site_fp_category(site);
  ++fp_categories_[category];
  if (category != FpCategory::kNone) ++fp_any_;

  const std::string& name = site.begin()->second.site_etld1;
  if (max_tp >= cfg_.extreme_third_parties) {
    extremes_.insert(ExtremeFlag{name, ExtremeReason::kManyThirdParties, max_tp_action, max_tp,
                                 cfg_.extreme_third_parties});
  }
  if (const auto [n, action] = widest_leak(site, Party::kThird);
      n > 0 && n >= cfg_.extreme_sync_recipients) {
    extremes_.insert(
        ExtremeFlag{name, ExtremeReason::kWideSync, action, n, cfg_.extreme_sync_recipients});
  }
  if (const auto [n, action] = widest_leak(site, Party::kFirst);
      n > 0 && n >= cfg_.extreme_sync_recipients) {
    extremes_.insert(ExtremeFlag{name, ExtremeReason::kWideFirstPartyLeak, action, n,
                                 cfg_.extreme_sync_recipients});
  }
}

namespace {

template <typename K, typename V, typename F>
void merge_maps(std::map<K, V>& into, const std::map<K, V>& from, F&& combine) {
  for (const auto& [k, v] : from) combine(into[k], v);
}

}  // namespace

void CorpusAccumulator::merge(const CorpusAccumulator& other) {
  const auto add_tally = [](Tally& a, const Tally& b) {
    a.ids += b.ids;
    a.recipients += b.recipients;
  };
  const auto add_group = [&](GroupAcc& a, const GroupAcc& b) {
    a.sites += b.sites;
    merge_maps(a.tallies, b.tallies, add_tally);
  };
  const auto add_count = [](std::size_t& a, std::size_t b) { a += b; };

  sites_ += other.sites_;
  merge_maps(actions_, other.actions_, [&](ActionAcc& a, const ActionAcc& b) {
    a.sites += b.sites;
    a.first_party_leak += b.first_party_leak;
    a.third_party_sync += b.third_party_sync;
    a.fingerprinting += b.fingerprinting;
    merge_maps(a.tp_counts, b.tp_counts, add_count);
  });
  merge_maps(tallies_, other.tallies_, add_tally);
  merge_maps(learnings_, other.learnings_,
             [&](std::map<std::string, std::size_t>& a,
                 const std::map<std::string, std::size_t>& b) { merge_maps(a, b, add_count); });
  merge_maps(buckets_, other.buckets_, add_group);
  merge_maps(countries_, other.countries_, add_group);
  fp_any_ += other.fp_any_;
  merge_maps(fp_categories_, other.fp_categories_, add_count);
  extremes_.insert(other.extremes_.begin(), other.extremes_.end());
}

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) * 100.0 / static_cast<double>(whole);
}

double mean(std::size_t total, std::size_t count) {
  return count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count);
}

std::vector<double> expand(const std::map<std::size_t, std::size_t>& counts) {
  std::vector<double> out;
  for (const auto& [value, times] : counts) out.insert(out.end(), times, static_cast<double>(value));
  return out;
}

}  // namespace

ActionSeries CorpusAccumulator::series(const GroupAcc& group, Party party) const {
  ActionSeries s;
  std::map<ConsentAction, double> raw;
  for (ConsentAction action : kAllActions) {
    const auto it = group.tallies.find({party, action});
    const Tally t = it == group.tallies.end() ? Tally{} : it->second;
    s.average[action] = RecipientAverage{t.ids, t.recipients, mean(t.recipients, t.ids)};
    raw[action] = s.average[action].average;
  }
  s.normalized = normalize_to_accept(raw);
  return s;
}

CorpusStats CorpusAccumulator::finish() const {
  if (sites_ == 0) throw EmptyCorpusError("no sites to aggregate");
  CorpusStats stats;
  stats.sites = sites_;

  for (const auto& [action, acc] : actions_) {
    stats.engagement[action] =
        EngagementRow{acc.sites, acc.first_party_leak, percent(acc.first_party_leak, acc.sites),
                      acc.third_party_sync, percent(acc.third_party_sync, acc.sites)};
    for (Party party : {Party::kFirst, Party::kThird}) {
      const auto it = tallies_.find({party, action});
      const Tally t = it == tallies_.end() ? Tally{} : it->second;
      stats.avg_recipients[{party, action}] =
          RecipientAverage{t.ids, t.recipients, mean(t.recipients, t.ids)};
    }
    stats.tp_count_summary[action] = five_number_summary(expand(acc.tp_counts));
    stats.fp_table.per_action[action] = acc.fingerprinting;
    stats.fp_table.per_action_pct[action] = percent(acc.fingerprinting, acc.sites);
  }

  for (const auto& [key, per_domain] : learnings_) {
    std::size_t total = 0;
    std::vector<PartyShare> ranked;
    for (const auto& [domain, n] : per_domain) {
      total += n;
      ranked.push_back(PartyShare{domain, n, 0});
    }
    std::sort(ranked.begin(), ranked.end(), [](const PartyShare& a, const PartyShare& b) {
      return a.learnings != b.learnings ? a.learnings > b.learnings : a.domain < b.domain;
    });
    if (ranked.size() > cfg_.top_n) ranked.resize(cfg_.top_n);
    for (PartyShare& p : ranked) p.share_pct = percent(p.learnings, total);
    stats.top_third_parties[key] = std::move(ranked);
  }

  for (const auto& [first, second] : kKsPairs) {
    const auto a = actions_.find(first);
    const auto b = actions_.find(second);
    if (a == actions_.end() || b == actions_.end()) continue;
    stats.ks_results.push_back(
        KsComparison{first, second, ks_two_sample(expand(a->second.tp_counts),
                                                   expand(b->second.tp_counts))});
  }

  for (const auto& [index, group] : buckets_) {
    RankBucket bucket;
    bucket.index = index;
    bucket.lo = index * cfg_.bucket_width + 1;
    bucket.hi = bucket.lo + cfg_.bucket_width;
    bucket.sites = group.sites;
    bucket.first_party = series(group, Party::kFirst);
    bucket.third_party = series(group, Party::kThird);
    stats.rank_buckets.push_back(std::move(bucket));
  }
  for (Party party : {Party::kFirst, Party::kThird}) {
    RankTrend trend;
    for (ConsentAction action : {ConsentAction::kNoAction, ConsentAction::kRejectAll}) {
      std::vector<std::pair<double, double>> points;
      for (const RankBucket& b : stats.rank_buckets) {
        const ActionSeries& s = party == Party::kFirst ? b.first_party : b.third_party;
        if (s.normalized.zero_reference) continue;
        points.emplace_back(static_cast<double>(b.index), s.normalized.percent.at(action));
      }
      if (points.size() >= 2) trend.fits[action] = linear_fit(points);
    }
    stats.rank_trends[party] = std::move(trend);
  }

  for (const auto& [label, group] : countries_) {
    stats.cctld_groups.push_back(CcTldGroup{label, group.sites, series(group, Party::kFirst),
                                            series(group, Party::kThird)});
  }

  stats.fp_table.at_least_one = fp_any_;
  stats.fp_table.at_least_one_pct = percent(fp_any_, sites_);
  for (FpCategory category : kAllFpCategories) {
    const auto it = fp_categories_.find(category);
    const std::size_t n = it == fp_categories_.end() ? 0 : it->second;
    stats.fp_table.categories[category] = n;
    if (category != FpCategory::kNone) stats.fp_table.category_pct[category] = percent(n, fp_any_);
  }

  stats.extremes.assign(extremes_.begin(), extremes_.end());
  return stats;
}

CorpusStats aggregate(std::span<const SiteAudits> corpus, const AnalyticsConfig& cfg) {
  CorpusAccumulator acc(cfg);
  for (const SiteAudits& site : corpus) acc.add(site);
  return acc.finish();
}

}  // namespace consent_audit
