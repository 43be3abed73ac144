#include "consent_audit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "consent_audit/public_suffix.hpp"

namespace consent_audit::oracle {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string naive_decode(const std::string& s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '%' && i + 2 < s.size() && hex_digit(s[i + 1]) >= 0 && hex_digit(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_digit(s[i + 1]) * 16 + hex_digit(s[i + 2]));
      i += 3;
    } else {
      out += s[i];
      i += 1;
    }
  }
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  for (const std::string& e : v) {
    if (e == x) return true;
  }
  return false;
}

void add_token(std::vector<std::string>& out, const std::string& raw) {
  if (raw.empty()) return;
  if (!contains(out, raw)) out.push_back(raw);
  const std::string decoded = naive_decode(raw);
  if (!decoded.empty() && !contains(out, decoded)) out.push_back(decoded);
}

std::string strip_spaces(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct NaiveUrl {
  bool ok = false;
  std::string authority;
  std::string path;
  std::string query;
  bool has_query = false;
};

NaiveUrl naive_split(const std::string& text) {
  NaiveUrl u;
  const std::string s = strip_spaces(text);
  const std::size_t sep = s.find("://");
  if (sep == std::string::npos || sep == 0) return u;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return u;
  for (std::size_t i = 0; i < sep; ++i) {
    const char c = s[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) {
      return u;
    }
  }
  std::size_t i = sep + 3;
  while (i < s.size() && s[i] != '/' && s[i] != '?' && s[i] != '#') u.authority += s[i++];
  while (i < s.size() && s[i] != '?' && s[i] != '#') u.path += s[i++];
  if (i < s.size() && s[i] == '?') {
    u.has_query = true;
    ++i;
    while (i < s.size() && s[i] != '#') u.query += s[i++];
  }
  u.ok = true;
  return u;
}

std::string naive_host(const std::string& authority) {
  std::string a = authority;
  const auto at = a.rfind('@');
  if (at != std::string::npos) a = a.substr(at + 1);
  if (!a.empty() && a[0] == '[') {
    const auto close = a.find(']');
    return close == std::string::npos ? "" : a.substr(1, close - 1);
  }
  const auto colon = a.rfind(':');
  if (colon != std::string::npos) a = a.substr(0, colon);
  // A host with blanks or slashes is not a host at all.
  for (char c : a) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == '/' ||
        c == '\\') {
      return "";
    }
  }
  return a;
}

struct Tally {
  std::size_t ids = 0;
  std::size_t recipients = 0;
};

double pct(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) * 100.0 / static_cast<double>(whole);
}

double avg(std::size_t total, std::size_t count) {
  return count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count);
}

double type7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

Tally tally(const std::vector<const SiteAudits*>& sites, Party party, ConsentAction action) {
  Tally t;
  for (const SiteAudits* site : sites) {
    const auto it = site->find(action);
    if (it == site->end()) continue;
    for (const auto& [id, recipients] : it->second.recipients_per_id) {
      if (id.party != party || recipients.empty()) continue;
      t.ids += 1;
      t.recipients += recipients.size();
    }
  }
  return t;
}

ActionSeries series_of(const std::vector<const SiteAudits*>& sites, Party party) {
  ActionSeries s;
  for (ConsentAction action : kAllActions) {
    const Tally t = tally(sites, party, action);
    s.average[action] = RecipientAverage{t.ids, t.recipients, avg(t.recipients, t.ids)};
  }
  const double reference = s.average[ConsentAction::kAcceptAll].average;
  s.normalized.zero_reference = reference == 0.0;
  for (ConsentAction action : kAllActions) {
    s.normalized.percent[action] =
        s.normalized.zero_reference ? 0.0 : s.average[action].average / reference * 100.0;
  }
  return s;
}

FpCategory category_of(const SiteAudits& site) {
  bool f[3] = {false, false, false};
  for (const auto& [action, audit] : site) f[static_cast<int>(action)] = audit.fingerprinting.detected;
  const int mask = (f[0] ? 1 : 0) | (f[1] ? 2 : 0) | (f[2] ? 4 : 0);
  switch (mask) {
    case 0:
      return FpCategory::kNone;
    case 1:
      return FpCategory::kOnlyNoAction;
    case 2:
      return FpCategory::kOnlyReject;
    case 4:
      return FpCategory::kOnlyAccept;
    case 6:
      return FpCategory::kWaitForAction;
    case 7:
      return FpCategory::kAllThree;
    default:
      return FpCategory::kOther;
  }
}

std::optional<std::string> country_of(const SiteAudits& site) {
  std::string label;
  for (ConsentAction action : kAllActions) {
    const auto it = site.find(action);
    if (it != site.end() && it->second.cc_tld) {
      label = *it->second.cc_tld;
      break;
    }
  }
  if (label.empty()) {
    const std::string& name = site.begin()->second.site_etld1;
    label = name.substr(name.rfind('.') == std::string::npos ? 0 : name.rfind('.') + 1);
  }
  std::transform(label.begin(), label.end(), label.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (label.size() != 2 || !std::isalpha(static_cast<unsigned char>(label[0])) ||
      !std::isalpha(static_cast<unsigned char>(label[1]))) {
    return std::nullopt;
  }
  return label;
}

}  // namespace

std::vector<std::string> naive_url_tokens(const std::string& url, const std::string& delimiters) {
  std::vector<std::string> out;
  const NaiveUrl u = naive_split(url);
  if (!u.ok) return out;
  std::string segment;
  for (char c : u.path + "/") {
    if (c == '/') {
      add_token(out, segment);
      segment.clear();
    } else {
      segment += c;
    }
  }
  if (!u.has_query) return out;
  std::string fragment;
  for (char c : u.query + delimiters.substr(0, 1)) {
    if (delimiters.find(c) != std::string::npos) {
      add_token(out, fragment);
      const auto eq = fragment.find('=');
      if (eq != std::string::npos) add_token(out, fragment.substr(eq + 1));
      fragment.clear();
    } else {
      fragment += c;
    }
  }
  return out;
}

std::vector<LeakEvent> detect_leaks(const SiteCapture& capture, std::span<const CandidateId> ids,
                                    const FilterConfig& cfg) {
  const std::string delims(cfg.split_delimiters.begin(), cfg.split_delimiters.end());
  std::vector<LeakEvent> events;
  for (const CandidateId& id : ids) {
    for (std::size_t i = 0; i < capture.requests.size(); ++i) {
      const HttpRequest& req = capture.requests[i];
      const NaiveUrl u = naive_split(req.url);
      if (!u.ok) continue;
      const std::string recipient = etld_plus_one(naive_host(u.authority));
      if (recipient.empty() || recipient == id.owner) continue;
      if (id.party == Party::kFirst && recipient == capture.site_etld1) continue;
      for (Channel channel : kAllChannels) {
        bool hit = false;
        if (channel == Channel::kUrlParam) {
          hit = contains(naive_url_tokens(req.url, delims), id.value);
        } else if (channel == Channel::kBody) {
          hit = req.body.has_value() && req.body->find(id.value) != std::string::npos;
        } else {
          for (const auto& [name, value] : req.headers.entries()) {
            std::string lower = name;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower != "referer") continue;
            if (naive_split(value).ok && !naive_host(naive_split(value).authority).empty()) {
              hit = contains(naive_url_tokens(value, delims), id.value);
            } else {
              hit = value.find(id.value) != std::string::npos;
            }
            break;  // first Referer header only
          }
        }
        if (!hit) continue;
        LeakEvent e{id, recipient, channel, i};
        if (std::find(events.begin(), events.end(), e) == events.end()) events.push_back(e);
      }
    }
  }
  std::sort(events.begin(), events.end(), event_order);
  return events;
}

CorpusStats aggregate(std::span<const SiteAudits> corpus, const AnalyticsConfig& cfg) {
  std::vector<const SiteAudits*> all;
  for (const SiteAudits& site : corpus) {
    if (!site.empty()) all.push_back(&site);
  }
  if (all.empty()) throw EmptyCorpusError("no sites to aggregate");

  CorpusStats stats;
  stats.sites = all.size();
  std::map<ConsentAction, std::vector<double>> tp_samples;

  for (ConsentAction action : kAllActions) {
    std::size_t present = 0;
    std::size_t leak = 0;
    std::size_t sync = 0;
    std::size_t fp = 0;
    std::vector<double> tp;
    for (const SiteAudits* site : all) {
      const auto it = site->find(action);
      if (it == site->end()) continue;
      ++present;
      if (it->second.first_party_leak) ++leak;
      if (it->second.third_party_sync) ++sync;
      if (it->second.fingerprinting.detected) ++fp;
      tp.push_back(static_cast<double>(it->second.third_party_count));
    }
    if (present == 0) continue;
    stats.engagement[action] = EngagementRow{present, leak, pct(leak, present), sync, pct(sync, present)};
    for (Party party : {Party::kFirst, Party::kThird}) {
      const Tally t = tally(all, party, action);
      stats.avg_recipients[{party, action}] =
          RecipientAverage{t.ids, t.recipients, avg(t.recipients, t.ids)};

      std::map<std::string, std::size_t> per_domain;
      for (const SiteAudits* site : all) {
        const auto it = site->find(action);
        if (it == site->end()) continue;
        for (const auto& [id, recipients] : it->second.recipients_per_id) {
          if (id.party != party) continue;
          for (const std::string& r : recipients) per_domain[r] += 1;
        }
      }
      std::size_t total = 0;
      for (const auto& [domain, n] : per_domain) total += n;
      if (total == 0) continue;
      std::vector<PartyShare> ranked;
      // Repeated selection of the best remaining domain.
      std::set<std::string> taken;
      while (ranked.size() < cfg.top_n && taken.size() < per_domain.size()) {
        const std::pair<const std::string, std::size_t>* best = nullptr;
        for (const auto& entry : per_domain) {
          if (taken.contains(entry.first)) continue;
          if (best == nullptr || entry.second > best->second) best = &entry;
        }
        taken.insert(best->first);
        ranked.push_back(PartyShare{best->first, best->second, pct(best->second, total)});
      }
      stats.top_third_parties[{party, action}] = std::move(ranked);
    }
    std::sort(tp.begin(), tp.end());
    stats.tp_count_summary[action] =
        FiveNumberSummary{tp.front(), type7(tp, 0.25), type7(tp, 0.5), type7(tp, 0.75), tp.back()};
    tp_samples[action] = tp;
    stats.fp_table.per_action[action] = fp;
    stats.fp_table.per_action_pct[action] = pct(fp, present);
  }

  for (const auto& [first, second] : kKsPairs) {
    if (!tp_samples.contains(first) || !tp_samples.contains(second)) continue;
    const auto& a = tp_samples[first];
    const auto& b = tp_samples[second];
    std::vector<double> thresholds = a;
    thresholds.insert(thresholds.end(), b.begin(), b.end());
    double d = 0;
    for (double t : thresholds) {
      std::size_t ca = 0;
      std::size_t cb = 0;
      for (double x : a) ca += x <= t ? 1 : 0;
      for (double x : b) cb += x <= t ? 1 : 0;
      const double diff = std::abs(static_cast<double>(ca) / static_cast<double>(a.size()) -
                                   static_cast<double>(cb) / static_cast<double>(b.size()));
      d = std::max(d, diff);
    }
    stats.ks_results.push_back(
        KsComparison{first, second, KsResult{d, ks_asymptotic_p_value(d, a.size(), b.size())}});
  }

  if (cfg.bucket_width > 0) {
    std::set<std::uint64_t> indices;
    for (const SiteAudits* site : all) {
      for (const auto& [action, audit] : *site) {
        if (audit.rank) {
          indices.insert((*audit.rank - 1) / cfg.bucket_width);
          break;
        }
      }
    }
    for (std::uint64_t index : indices) {
      std::vector<const SiteAudits*> members;
      for (const SiteAudits* site : all) {
        for (const auto& [action, audit] : *site) {
          if (audit.rank) {
            if ((*audit.rank - 1) / cfg.bucket_width == index) members.push_back(site);
            break;
          }
        }
      }
      RankBucket b;
      b.index = index;
      b.lo = index * cfg.bucket_width + 1;
      b.hi = b.lo + cfg.bucket_width;
      b.sites = members.size();
      b.first_party = series_of(members, Party::kFirst);
      b.third_party = series_of(members, Party::kThird);
      stats.rank_buckets.push_back(std::move(b));
    }
  }
  for (Party party : {Party::kFirst, Party::kThird}) {
    RankTrend trend;
    for (ConsentAction action : {ConsentAction::kNoAction, ConsentAction::kRejectAll}) {
      std::vector<std::pair<double, double>> points;
      for (const RankBucket& b : stats.rank_buckets) {
        const ActionSeries& s = party == Party::kFirst ? b.first_party : b.third_party;
        if (!s.normalized.zero_reference) {
          points.emplace_back(static_cast<double>(b.index), s.normalized.percent.at(action));
        }
      }
      if (points.size() >= 2) trend.fits[action] = linear_fit(points);
    }
    stats.rank_trends[party] = trend;
  }

  std::map<std::string, std::vector<const SiteAudits*>> by_country;
  for (const SiteAudits* site : all) {
    if (const auto label = country_of(*site)) by_country[*label].push_back(site);
  }
  for (const auto& [label, members] : by_country) {
    stats.cctld_groups.push_back(CcTldGroup{label, members.size(), series_of(members, Party::kFirst),
                                            series_of(members, Party::kThird)});
  }

  std::size_t any = 0;
  for (FpCategory category : kAllFpCategories) stats.fp_table.categories[category] = 0;
  for (const SiteAudits* site : all) {
    const FpCategory c = category_of(*site);
    stats.fp_table.categories[c] += 1;
    if (c != FpCategory::kNone) ++any;
  }
  stats.fp_table.at_least_one = any;
  stats.fp_table.at_least_one_pct = pct(any, all.size());
  for (FpCategory category : kAllFpCategories) {
    if (category != FpCategory::kNone) {
      stats.fp_table.category_pct[category] = pct(stats.fp_table.categories[category], any);
    }
  }

  std::vector<ExtremeFlag> flags;
  for (const SiteAudits* site : all) {
    const std::string& name = site->begin()->second.site_etld1;
    std::size_t tp = 0;
    ConsentAction tp_action = ConsentAction::kNoAction;
    std::size_t widest[2] = {0, 0};
    ConsentAction widest_action[2] = {ConsentAction::kNoAction, ConsentAction::kNoAction};
    for (ConsentAction action : kAllActions) {
      const auto it = site->find(action);
      if (it == site->end()) continue;
      if (it->second.third_party_count > tp) {
        tp = it->second.third_party_count;
        tp_action = action;
      }
      for (const auto& [id, recipients] : it->second.recipients_per_id) {
        const int p = id.party == Party::kFirst ? 0 : 1;
        if (recipients.size() > widest[p]) {
          widest[p] = recipients.size();
          widest_action[p] = action;
        }
      }
    }
    if (tp >= cfg.extreme_third_parties) {
      flags.push_back({name, ExtremeReason::kManyThirdParties, tp_action, tp, cfg.extreme_third_parties});
    }
    if (widest[1] > 0 && widest[1] >= cfg.extreme_sync_recipients) {
      flags.push_back({name, ExtremeReason::kWideSync, widest_action[1], widest[1],
                       cfg.extreme_sync_recipients});
    }
    if (widest[0] > 0 && widest[0] >= cfg.extreme_sync_recipients) {
      flags.push_back({name, ExtremeReason::kWideFirstPartyLeak, widest_action[0], widest[0],
                       cfg.extreme_sync_recipients});
    }
  }
  std::sort(flags.begin(), flags.end());
  flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
  stats.extremes = std::move(flags);
  return stats;
}

}  // namespace consent_audit::oracle
