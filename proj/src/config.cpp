#include "consent_audit/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "consent_audit/strings.hpp"

namespace consent_audit {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::set<std::string> string_set(const json& doc, const char* key, bool lowercase) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw SchemaError(std::string("$.") + key, "expected an array of strings");
  std::set<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw SchemaError(std::string("$.") + key + "[" + std::to_string(i) + "]",
                        "expected a string");
    }
    out.insert(lowercase ? to_lower(v[i].get<std::string>()) : v[i].get<std::string>());
  }
  return out;
}

std::uint64_t positive(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw SchemaError(std::string("$.") + key, "expected a positive integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

AuditConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SchemaError("$", "config must be a JSON object");
  AuditConfig cfg;
  FilterConfig& f = cfg.detection.filter;
  if (doc.contains("keywords_file")) {
    if (!doc["keywords_file"].is_string()) throw SchemaError("$.keywords_file", "expected a string");
    std::filesystem::path p = doc["keywords_file"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    f.keyword_blacklist = parse_keyword_list(read_text(p));
  }
  // Inline list, as echoed by config_to_json(); wins over keywords_file.
  if (doc.contains("keywords")) f.keyword_blacklist = string_set(doc, "keywords", true);
  if (doc.contains("extra_keywords")) {
    for (const std::string& k : string_set(doc, "extra_keywords", true)) {
      f.keyword_blacklist.insert(k);
    }
  }
  if (doc.contains("consent_cookie_names")) {
    f.consent_cookie_names = string_set(doc, "consent_cookie_names", true);
  }
  if (doc.contains("min_length")) f.min_length = positive(doc, "min_length");
  if (doc.contains("split_delimiters")) {
    if (!doc["split_delimiters"].is_string()) {
      throw SchemaError("$.split_delimiters", "expected a string of delimiter characters");
    }
    const std::string d = doc["split_delimiters"].get<std::string>();
    f.split_delimiters = std::set<char>(d.begin(), d.end());
  }
  if (doc.contains("file_extension_suffixes")) {
    f.file_extension_suffixes = string_set(doc, "file_extension_suffixes", true);
  }
  if (doc.contains("sentinels")) cfg.detection.sentinels = string_set(doc, "sentinels", false);
  if (doc.contains("extra_sentinels")) {
    for (const std::string& s : string_set(doc, "extra_sentinels", false)) {
      cfg.detection.sentinels.insert(s);
    }
  }
  if (doc.contains("bucket_width")) cfg.analytics.bucket_width = positive(doc, "bucket_width");
  if (doc.contains("extreme_tp")) cfg.analytics.extreme_third_parties = positive(doc, "extreme_tp");
  if (doc.contains("extreme_sync")) {
    cfg.analytics.extreme_sync_recipients = positive(doc, "extreme_sync");
  }
  if (doc.contains("top_n")) cfg.analytics.top_n = positive(doc, "top_n");
  f.check();
  if (cfg.detection.sentinels.empty()) throw AuditError("config: sentinel set is empty");
  return cfg;
}

AuditConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("$", "config is not valid JSON: " + path.string());
  return config_from_json(doc, path.parent_path());
}

json config_to_json(const AuditConfig& cfg) {
  const FilterConfig& f = cfg.detection.filter;
  json doc;
  doc["keywords"] = f.keyword_blacklist;
  doc["consent_cookie_names"] = f.consent_cookie_names;
  doc["min_length"] = f.min_length;
  doc["split_delimiters"] = std::string(f.split_delimiters.begin(), f.split_delimiters.end());
  doc["file_extension_suffixes"] = f.file_extension_suffixes;
  doc["sentinels"] = cfg.detection.sentinels;
  doc["bucket_width"] = cfg.analytics.bucket_width;
  doc["extreme_tp"] = cfg.analytics.extreme_third_parties;
  doc["extreme_sync"] = cfg.analytics.extreme_sync_recipients;
  doc["top_n"] = cfg.analytics.top_n;
  return doc;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw AuditError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string config_digest(const AuditConfig& cfg) { return sha256_hex(config_to_json(cfg).dump()); }

}  // namespace consent_audit
