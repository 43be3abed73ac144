#ifndef CONSENT_AUDIT_CONFIG_HPP_
#define CONSENT_AUDIT_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "consent_audit/analytics.hpp"
#include "consent_audit/leak_detection.hpp"
#include "json.hpp"

namespace consent_audit {

// Everything that influences detection and aggregation results.
struct AuditConfig {
  DetectionConfig detection;
  AnalyticsConfig analytics;

  friend bool operator==(const AuditConfig&, const AuditConfig&) = default;
};

// JSON config file. Recognized keys (all optional):
//   keywords_file           keyword list replacing the bundled one; relative
//                           paths resolve against the config file's directory
//   keywords                inline keyword list, replaces keywords_file
//   extra_keywords          tokens added to the keyword list
//   consent_cookie_names    replaces the default consent cookie names
//   min_length              shortest accepted identifier (default 6)
//   split_delimiters        string of delimiter characters (default "&;")
//   file_extension_suffixes replaces the default asset suffixes
//   sentinels               replaces the default fingerprinting sentinels
//   extra_sentinels         names added to the sentinels
//   bucket_width, extreme_tp, extreme_sync, top_n
// Throws AuditError (or SchemaError for ill-typed values).
AuditConfig load_config(const std::filesystem::path& path);
AuditConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

// Effective configuration as canonical JSON (sorted keys and sets).
nlohmann::json config_to_json(const AuditConfig& cfg);

// Hex SHA-256 of config_to_json(cfg).dump().
std::string config_digest(const AuditConfig& cfg);

std::string sha256_hex(std::string_view data);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_CONFIG_HPP_
