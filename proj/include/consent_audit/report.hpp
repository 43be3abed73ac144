#ifndef CONSENT_AUDIT_REPORT_HPP_
#define CONSENT_AUDIT_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "consent_audit/analytics.hpp"
#include "consent_audit/config.hpp"
#include "json.hpp"

namespace consent_audit {

struct AuditReport {
  std::string tool_version = CONSENT_AUDIT_VERSION;
  AuditConfig config;
  // Latest capture_time in the corpus, so identical inputs give identical bytes.
  Timestamp generated_at{};
  std::vector<SiteAudits> sites;  // sorted by registrable domain
  CorpusStats corpus;
  std::vector<std::string> skipped;   // diagnostics for files or sites left out
  std::vector<std::string> warnings;  // non-fatal input problems
};

nlohmann::json to_json(const LeakEvent& event);
LeakEvent leak_event_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SiteAudit& audit);
SiteAudit site_audit_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SiteAudits& site);
SiteAudits site_audits_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CorpusStats& stats);

// Report document; keys are emitted in sorted order.
nlohmann::json to_json(const AuditReport& report);
std::string report_to_string(const AuditReport& report);

// One CSV file per corpus table, written into `dir` (created if missing).
// Returns the paths written.
std::vector<std::filesystem::path> write_csv_tables(const CorpusStats& stats,
                                                    const std::filesystem::path& dir);

// Re-derives the corpus section of a report document from its per-site
// section and checks every per-site audit for internal consistency. Corpora
// of at most `oracle_site_limit` sites are also recomputed by the brute-force
// oracle. Returns the list of mismatches (empty when the report is
// consistent).
inline constexpr std::size_t kDefaultOracleSiteLimit = 100;
std::vector<std::string> self_check_report(const nlohmann::json& report,
                                           std::size_t oracle_site_limit = kDefaultOracleSiteLimit);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_REPORT_HPP_
