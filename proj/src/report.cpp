#include "consent_audit/report.hpp"

#include <fstream>

#include "consent_audit/oracle.hpp"

namespace consent_audit {

using nlohmann::json;

namespace {

template <typename T, typename Parse>
T enum_field(const json& doc, const char* key, Parse parse) {
  const auto value = parse(doc.at(key).get<std::string>());
  if (!value) throw SchemaError(std::string("$.") + key, "unknown value " + doc.at(key).dump());
  return *value;
}

json series_json(const ActionSeries& s) {
  json avg = json::array();
  json norm = json::array();
  for (const auto& [action, a] : s.average) {
    avg.push_back({{"action", to_string(action)},
                   {"ids", a.ids},
                   {"recipients", a.recipients},
                   {"average", a.average}});
  }
  for (const auto& [action, p] : s.normalized.percent) {
    norm.push_back({{"action", to_string(action)}, {"percent", p}});
  }
  return {{"average", avg}, {"normalized", norm}, {"zero_reference", s.normalized.zero_reference}};
}

}  // namespace

json to_json(const LeakEvent& e) {
  return {{"value", e.id.value},
          {"owner", e.id.owner},
          {"source_cookie", e.id.source_cookie},
          {"party", to_string(e.id.party)},
          {"recipient", e.recipient},
          {"channel", to_string(e.channel)},
          {"request_index", e.request_index}};
}

LeakEvent leak_event_from_json(const json& j) {
  LeakEvent e;
  e.id = CandidateId{j.at("value").get<std::string>(), j.at("owner").get<std::string>(),
                     j.at("source_cookie").get<std::string>(),
                     enum_field<Party>(j, "party", parse_party)};
  e.recipient = j.at("recipient").get<std::string>();
  e.channel = enum_field<Channel>(j, "channel", parse_channel);
  e.request_index = j.at("request_index").get<std::size_t>();
  return e;
}

json to_json(const SiteAudit& audit) {
  json doc;
  doc["site_etld1"] = audit.site_etld1;
  doc["consent_action"] = to_string(audit.consent_action);
  if (audit.rank) doc["rank"] = *audit.rank;
  if (audit.cc_tld) doc["cc_tld"] = *audit.cc_tld;
  doc["first_party_leak"] = audit.first_party_leak;
  doc["third_party_sync"] = audit.third_party_sync;
  doc["third_party_count"] = audit.third_party_count;
  doc["fingerprinting"] = {{"detected", audit.fingerprinting.detected},
                           {"matched_functions", audit.fingerprinting.matched_functions},
                           {"scripts", audit.fingerprinting.scripts}};
  json ids = json::array();
  for (const auto& [id, recipients] : audit.recipients_per_id) {
    ids.push_back({{"value", id.value},
                   {"owner", id.owner},
                   {"source_cookie", id.source_cookie},
                   {"party", to_string(id.party)},
                   {"recipients", recipients}});
  }
  doc["ids"] = std::move(ids);
  json events = json::array();
  for (const LeakEvent& e : audit.leak_events) events.push_back(to_json(e));
  doc["leak_events"] = std::move(events);
  return doc;
}

SiteAudit site_audit_from_json(const json& doc) {
  SiteAudit audit;
  audit.site_etld1 = doc.at("site_etld1").get<std::string>();
  audit.consent_action = enum_field<ConsentAction>(doc, "consent_action", parse_consent_action);
  if (doc.contains("rank")) audit.rank = doc.at("rank").get<std::uint64_t>();
  if (doc.contains("cc_tld")) audit.cc_tld = doc.at("cc_tld").get<std::string>();
  audit.first_party_leak = doc.at("first_party_leak").get<bool>();
  audit.third_party_sync = doc.at("third_party_sync").get<bool>();
  audit.third_party_count = doc.at("third_party_count").get<std::size_t>();
  const json& fp = doc.at("fingerprinting");
  audit.fingerprinting.detected = fp.at("detected").get<bool>();
  audit.fingerprinting.matched_functions = fp.at("matched_functions").get<std::set<std::string>>();
  audit.fingerprinting.scripts = fp.at("scripts").get<std::set<std::string>>();
  for (const json& j : doc.at("ids")) {
    CandidateId id{j.at("value").get<std::string>(), j.at("owner").get<std::string>(),
                   j.at("source_cookie").get<std::string>(),
                   enum_field<Party>(j, "party", parse_party)};
    audit.recipients_per_id[id] = j.at("recipients").get<std::set<std::string>>();
  }
  for (const json& j : doc.at("leak_events")) audit.leak_events.push_back(leak_event_from_json(j));
  return audit;
}

json to_json(const SiteAudits& site) {
  json audits = json::array();
  for (const auto& [action, audit] : site) audits.push_back(to_json(audit));
  return {{"site", site.empty() ? "" : site.begin()->second.site_etld1}, {"audits", audits}};
}

SiteAudits site_audits_from_json(const json& doc) {
  SiteAudits site;
  for (const json& a : doc.at("audits")) {
    SiteAudit audit = site_audit_from_json(a);
    const ConsentAction action = audit.consent_action;
    site.emplace(action, std::move(audit));
  }
  return site;
}

json to_json(const CorpusStats& stats) {
  json doc;
  doc["sites"] = stats.sites;

  json engagement = json::array();
  for (const auto& [action, row] : stats.engagement) {
    engagement.push_back({{"action", to_string(action)},
                          {"sites", row.sites},
                          {"first_party_leak", row.first_party_leak},
                          {"first_party_leak_pct", row.first_party_leak_pct},
                          {"third_party_sync", row.third_party_sync},
                          {"third_party_sync_pct", row.third_party_sync_pct}});
  }
  doc["engagement"] = std::move(engagement);

  json avg = json::array();
  for (const auto& [key, a] : stats.avg_recipients) {
    avg.push_back({{"party", to_string(key.first)},
                   {"action", to_string(key.second)},
                   {"ids", a.ids},
                   {"recipients", a.recipients},
                   {"average", a.average}});
  }
  doc["avg_recipients"] = std::move(avg);

  json top = json::array();
  for (const auto& [key, ranking] : stats.top_third_parties) {
    json rows = json::array();
    for (const PartyShare& p : ranking) {
      rows.push_back({{"domain", p.domain}, {"learnings", p.learnings}, {"share_pct", p.share_pct}});
    }
    top.push_back({{"party", to_string(key.first)},
                   {"action", to_string(key.second)},
                   {"ranking", std::move(rows)}});
  }
  doc["top_third_parties"] = std::move(top);

  json tp = json::array();
  for (const auto& [action, s] : stats.tp_count_summary) {
    tp.push_back({{"action", to_string(action)},
                  {"min", s.min},
                  {"q25", s.q25},
                  {"median", s.median},
                  {"q75", s.q75},
                  {"max", s.max}});
  }
  doc["third_party_counts"] = std::move(tp);

  json ks = json::array();
  for (const KsComparison& k : stats.ks_results) {
    ks.push_back({{"first", to_string(k.first)},
                  {"second", to_string(k.second)},
                  {"d_statistic", k.result.d_statistic},
                  {"p_value", k.result.p_value}});
  }
  doc["ks_tests"] = std::move(ks);

  json buckets = json::array();
  for (const RankBucket& b : stats.rank_buckets) {
    buckets.push_back({{"index", b.index},
                       {"lo", b.lo},
                       {"hi", b.hi},
                       {"sites", b.sites},
                       {"first_party", series_json(b.first_party)},
                       {"third_party", series_json(b.third_party)}});
  }
  doc["rank_buckets"] = std::move(buckets);

  json trends = json::array();
  for (const auto& [party, trend] : stats.rank_trends) {
    for (const auto& [action, fit] : trend.fits) {
      trends.push_back({{"party", to_string(party)},
                        {"action", to_string(action)},
                        {"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"r_squared", fit.r_squared}});
    }
  }
  doc["rank_trends"] = std::move(trends);

  json groups = json::array();
  for (const CcTldGroup& g : stats.cctld_groups) {
    groups.push_back({{"cc_tld", g.cc_tld},
                      {"sites", g.sites},
                      {"first_party", series_json(g.first_party)},
                      {"third_party", series_json(g.third_party)}});
  }
  doc["cctld_groups"] = std::move(groups);

  json per_action = json::array();
  for (const auto& [action, n] : stats.fp_table.per_action) {
    per_action.push_back({{"action", to_string(action)},
                          {"sites", n},
                          {"pct", stats.fp_table.per_action_pct.at(action)}});
  }
  json categories = json::array();
  for (const auto& [category, n] : stats.fp_table.categories) {
    json row = {{"category", to_string(category)}, {"sites", n}};
    if (const auto it = stats.fp_table.category_pct.find(category);
        it != stats.fp_table.category_pct.end()) {
      row["pct"] = it->second;
    }
    categories.push_back(std::move(row));
  }
  doc["fingerprinting"] = {{"per_action", std::move(per_action)},
                           {"at_least_one", stats.fp_table.at_least_one},
                           {"at_least_one_pct", stats.fp_table.at_least_one_pct},
                           {"categories", std::move(categories)}};

  json extremes = json::array();
  for (const ExtremeFlag& f : stats.extremes) {
    extremes.push_back({{"site", f.site_etld1},
                        {"reason", to_string(f.reason)},
                        {"action", to_string(f.action)},
                        {"measured", f.measured},
                        {"threshold", f.threshold}});
  }
  doc["extremes"] = std::move(extremes);
  return doc;
}

json to_json(const AuditReport& report) {
  json doc;
  doc["tool"] = "consent-audit";
  doc["version"] = report.tool_version;
  doc["generated_at"] = format_timestamp(report.generated_at);
  doc["config"] = config_to_json(report.config);
  doc["config_digest"] = config_digest(report.config);
  doc["notes"] = {
      {"avg_recipients",
       "mean over (site, ID) pairs whose ID reached at least one recipient; sites without "
       "such IDs do not contribute"},
      {"third_party_count",
       "distinct registrable domains of script requests (all requests when the capture has no "
       "resource types), plus non-site recipients of leaked IDs; an approximation of third "
       "parties running a script"},
      {"wait_for_action", "fingerprinting under RejectAll and AcceptAll but not under NoAction"},
      {"quartiles", "linear interpolation between order statistics (type 7)"},
      {"ks_p_value", "asymptotic Kolmogorov distribution"},
      {"rank_trends", "least-squares line through normalized NoAction/RejectAll values against "
                      "the bucket index; buckets whose AcceptAll value is 0 are left out"}};
  json sites = json::array();
  for (const SiteAudits& s : report.sites) sites.push_back(to_json(s));
  doc["sites"] = std::move(sites);
  doc["corpus"] = to_json(report.corpus);
  doc["skipped"] = report.skipped;
  doc["warnings"] = report.warnings;
  return doc;
}

std::string report_to_string(const AuditReport& report) { return to_json(report).dump(1) + "\n"; }

namespace {

std::string csv_field(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<json> values) { rows_.push_back(std::move(values)); }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AuditError("cannot write " + path.string());
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
      out << "\n";
    }
    if (!out) throw AuditError("cannot write " + path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<json>> rows_;
};

void series_rows(CsvTable& table, const std::vector<json>& prefix, const char* party,
                 const ActionSeries& s) {
  for (const auto& [action, a] : s.average) {
    std::vector<json> r = prefix;
    r.insert(r.end(), {party, to_string(action), a.ids, a.recipients, a.average,
                       s.normalized.percent.at(action), s.normalized.zero_reference});
    table.row(std::move(r));
  }
}

}  // namespace

std::vector<std::filesystem::path> write_csv_tables(const CorpusStats& stats,
                                                    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw AuditError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const char* name, const CsvTable& table) {
    const auto path = dir / name;
    table.write(path);
    written.push_back(path);
  };

  CsvTable engagement({"action", "sites", "first_party_leak", "first_party_leak_pct",
                       "third_party_sync", "third_party_sync_pct"});
  for (const auto& [action, row] : stats.engagement) {
    engagement.row({to_string(action), row.sites, row.first_party_leak, row.first_party_leak_pct,
                    row.third_party_sync, row.third_party_sync_pct});
  }
  emit("engagement.csv", engagement);

  CsvTable avg({"party", "action", "ids", "recipients", "average"});
  for (const auto& [key, a] : stats.avg_recipients) {
    avg.row({to_string(key.first), to_string(key.second), a.ids, a.recipients, a.average});
  }
  emit("avg_recipients.csv", avg);

  CsvTable top({"party", "action", "rank", "domain", "learnings", "share_pct"});
  for (const auto& [key, ranking] : stats.top_third_parties) {
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      top.row({to_string(key.first), to_string(key.second), i + 1, ranking[i].domain,
               ranking[i].learnings, ranking[i].share_pct});
    }
  }
  emit("top_third_parties.csv", top);

  CsvTable tp({"action", "min", "q25", "median", "q75", "max"});
  for (const auto& [action, s] : stats.tp_count_summary) {
    tp.row({to_string(action), s.min, s.q25, s.median, s.q75, s.max});
  }
  emit("third_party_counts.csv", tp);

  CsvTable ks({"first", "second", "d_statistic", "p_value"});
  for (const KsComparison& k : stats.ks_results) {
    ks.row({to_string(k.first), to_string(k.second), k.result.d_statistic, k.result.p_value});
  }
  emit("ks_tests.csv", ks);

  CsvTable buckets({"index", "lo", "hi", "sites", "party", "action", "ids", "recipients",
                    "average", "normalized_pct", "zero_reference"});
  for (const RankBucket& b : stats.rank_buckets) {
    const std::vector<json> prefix{b.index, b.lo, b.hi, b.sites};
    series_rows(buckets, prefix, "First", b.first_party);
    series_rows(buckets, prefix, "Third", b.third_party);
  }
  emit("rank_buckets.csv", buckets);

  CsvTable trends({"party", "action", "slope", "intercept", "r_squared"});
  for (const auto& [party, trend] : stats.rank_trends) {
    for (const auto& [action, fit] : trend.fits) {
      trends.row({to_string(party), to_string(action), fit.slope, fit.intercept, fit.r_squared});
    }
  }
  emit("rank_trends.csv", trends);

  CsvTable groups({"cc_tld", "sites", "party", "action", "ids", "recipients", "average",
                   "normalized_pct", "zero_reference"});
  for (const CcTldGroup& g : stats.cctld_groups) {
    const std::vector<json> prefix{g.cc_tld, g.sites};
    series_rows(groups, prefix, "First", g.first_party);
    series_rows(groups, prefix, "Third", g.third_party);
  }
  emit("cctld_groups.csv", groups);

  CsvTable fp({"row", "sites", "pct"});
  for (const auto& [action, n] : stats.fp_table.per_action) {
    fp.row({to_string(action), n, stats.fp_table.per_action_pct.at(action)});
  }
  fp.row({"AtLeastOne", stats.fp_table.at_least_one, stats.fp_table.at_least_one_pct});
  for (const auto& [category, n] : stats.fp_table.categories) {
    const auto it = stats.fp_table.category_pct.find(category);
    fp.row({to_string(category), n,
            it == stats.fp_table.category_pct.end() ? json(nullptr) : json(it->second)});
  }
  emit("fingerprinting.csv", fp);

  CsvTable extremes({"site", "reason", "action", "measured", "threshold"});
  for (const ExtremeFlag& f : stats.extremes) {
    extremes.row({f.site_etld1, to_string(f.reason), to_string(f.action), f.measured, f.threshold});
  }
  emit("extremes.csv", extremes);
  return written;
}

std::vector<std::string> self_check_report(const json& report, std::size_t oracle_site_limit) {
  std::vector<std::string> problems;
  AuditConfig cfg;
  try {
    cfg = config_from_json(
        json{{"bucket_width", report.at("config").at("bucket_width")},
             {"extreme_tp", report.at("config").at("extreme_tp")},
             {"extreme_sync", report.at("config").at("extreme_sync")},
             {"top_n", report.at("config").at("top_n")}},
        {});
  } catch (const std::exception& e) {
    return {std::string("unreadable config section: ") + e.what()};
  }

  std::vector<SiteAudits> sites;
  try {
    for (const json& s : report.at("sites")) sites.push_back(site_audits_from_json(s));
  } catch (const std::exception& e) {
    return {std::string("unreadable sites section: ") + e.what()};
  }

  for (const SiteAudits& site : sites) {
    for (const auto& [action, audit] : site) {
      SiteAudit rebuilt = audit;
      summarize_events(rebuilt);
      const std::string where = audit.site_etld1 + "/" + std::string(to_string(action));
      if (rebuilt.recipients_per_id != audit.recipients_per_id) {
        problems.push_back(where + ": ids/recipients disagree with leak_events");
      }
      if (rebuilt.first_party_leak != audit.first_party_leak ||
          rebuilt.third_party_sync != audit.third_party_sync) {
        problems.push_back(where + ": leak flags disagree with leak_events");
      }
      if (audit.fingerprinting.detected == audit.fingerprinting.matched_functions.empty()) {
        problems.push_back(where + ": fingerprinting verdict disagrees with matched functions");
      }
      for (const LeakEvent& e : audit.leak_events) {
        if (e.recipient == e.id.owner) {
          problems.push_back(where + ": event delivers " + e.id.value + " to its owner");
        }
      }
    }
  }

  if (sites.empty()) {
    if (!report.at("corpus").is_null()) problems.push_back("corpus section without sites");
    return problems;
  }
  const json expected = to_json(aggregate(sites, cfg.analytics));
  const json& actual = report.at("corpus");
  if (expected != actual) {
    for (const auto& [key, value] : expected.items()) {
      if (!actual.contains(key) || actual.at(key) != value) {
        problems.push_back("corpus." + key + " does not match the per-site section");
      }
    }
    if (problems.empty()) problems.push_back("corpus section has unexpected fields");
  }
  if (sites.size() <= oracle_site_limit) {
    const json reference = to_json(oracle::aggregate(sites, cfg.analytics));
    if (reference != expected) {
      for (const auto& [key, value] : reference.items()) {
        if (expected.at(key) != value) {
          problems.push_back("corpus." + key + " differs between aggregator and oracle");
        }
      }
    }
  }
  return problems;
}

}  // namespace consent_audit
