#include "consent_audit/id_extraction.hpp"

#include <cctype>
#include <unordered_set>
#include <utility>

#include "consent_audit/strings.hpp"
#include "embedded_data.hpp"
#include "json.hpp"

namespace consent_audit {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool digits_at(std::string_view s, std::size_t pos, std::size_t n) {
  return pos + n <= s.size() && all_digits(s.substr(pos, n));
}

// YYYY-MM-DD[(T| )HH:MM[:SS[.f+]][Z|(+|-)HH[:]MM]]
bool is_iso8601(std::string_view s) {
  if (!digits_at(s, 0, 4) || s.size() < 10 || s[4] != '-' || !digits_at(s, 5, 2) || s[7] != '-' ||
      !digits_at(s, 8, 2)) {
    return false;
  }
  std::size_t pos = 10;
  if (pos == s.size()) return true;
  if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return false;
  ++pos;
  if (!digits_at(s, pos, 2) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !digits_at(s, pos + 3, 2)) {
    return false;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!digits_at(s, pos + 1, 2)) return false;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      const std::size_t start = ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == start) return false;
    }
  }
  if (pos == s.size()) return true;
  const std::string_view zone = s.substr(pos);
  if (zone == "Z" || zone == "z") return true;
  if (zone[0] != '+' && zone[0] != '-') return false;
  if (zone.size() == 6) return digits_at(zone, 1, 2) && zone[3] == ':' && digits_at(zone, 4, 2);
  if (zone.size() == 5) return digits_at(zone, 1, 4);
  return false;
}

constexpr std::string_view kWeekdays[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
constexpr std::string_view kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

template <std::size_t N>
bool one_of(std::string_view s, const std::string_view (&set)[N]) {
  for (std::string_view x : set) {
    if (s == x) return true;
  }
  return false;
}

// "Wdy, DD Mon YYYY HH:MM:SS GMT"
bool is_rfc1123(std::string_view s) {
  if (s.size() != 29) return false;
  return one_of(s.substr(0, 3), kWeekdays) && s.substr(3, 2) == ", " && digits_at(s, 5, 2) &&
         s[7] == ' ' && one_of(s.substr(8, 3), kMonths) && s[11] == ' ' && digits_at(s, 12, 4) &&
         s[16] == ' ' && digits_at(s, 17, 2) && s[19] == ':' && digits_at(s, 20, 2) &&
         s[22] == ':' && digits_at(s, 23, 2) && s.substr(25) == " GMT";
}

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

void collect_json_leaves(const nlohmann::ordered_json& node, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) collect_json_leaves(value, out);
  } else if (node.is_array()) {
    for (const auto& value : node) collect_json_leaves(value, out);
  } else if (node.is_string()) {
    out.push_back(node.get<std::string>());
  } else if (node.is_number()) {
    out.push_back(node.dump());
  }
}

std::vector<std::string> unique_nonempty(std::vector<std::string> values) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::string& v : values) {
    if (v.empty()) continue;
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

FilterConfig FilterConfig::defaults() {
  FilterConfig cfg;
  cfg.keyword_blacklist = parse_keyword_list(bundled_keyword_list());
  cfg.consent_cookie_names = {"euconsent", "eupubconsent", "__cmpconsent", "__cmpiab"};
  cfg.file_extension_suffixes = {".jpg", ".jpeg", ".png",  ".gif",  ".svg", ".webp", ".ico",
                                 ".bmp", ".css",  ".js",   ".mjs",  ".json", ".html", ".htm",
                                 ".php", ".asp",  ".aspx", ".xml",  ".txt", ".pdf",  ".woff",
                                 ".woff2", ".ttf", ".otf", ".eot", ".mp4", ".mp3", ".webm",
                                 ".zip", ".gz",   ".map"};
  return cfg;
}

void FilterConfig::check() const {
  if (min_length < 1) throw AuditError("filter config: min_length must be at least 1");
  if (split_delimiters.empty()) throw AuditError("filter config: no split delimiters");
}

std::set<std::string> parse_keyword_list(std::string_view text) {
  std::set<std::string> out;
  for (std::string_view line : split_any(text, "\n")) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.insert(to_lower(line));
  }
  return out;
}

std::string_view bundled_keyword_list() { return embedded::keyword_list(); }

std::vector<std::string> extract_values(std::string_view raw, const FilterConfig& cfg) {
  if (raw.empty()) return {};
  const std::string_view lead = trim(raw);
  if (!lead.empty() && (lead.front() == '{' || lead.front() == '[')) {
    auto doc = nlohmann::ordered_json::parse(lead, nullptr, /*allow_exceptions=*/false);
    if (!doc.is_discarded()) {
      std::vector<std::string> leaves;
      collect_json_leaves(doc, leaves);
      return unique_nonempty(std::move(leaves));
    }
  }
  std::vector<std::string> values{std::string(raw)};
  const std::string delims(cfg.split_delimiters.begin(), cfg.split_delimiters.end());
  if (raw.find_first_of(delims) != std::string_view::npos) {
    for (std::string_view fragment : split_any(raw, delims)) {
      values.emplace_back(trim(fragment));
    }
  }
  return unique_nonempty(std::move(values));
}

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::kKeyword:
      return "keyword";
    case FilterReason::kDateOrTimestamp:
      return "date_or_timestamp";
    case FilterReason::kLocale:
      return "locale";
    case FilterReason::kFileExtension:
      return "file_extension";
    case FilterReason::kUrl:
      return "url";
    case FilterReason::kTooShort:
      return "too_short";
  }
  return "keyword";
}

bool is_timestamp_like(std::string_view s) {
  // Pure integers of 8..13 digits cover epoch seconds/milliseconds and their
  // truncations as well as YYYYMMDD dates.
  if (all_digits(s) && s.size() >= 8 && s.size() <= 13) return true;
  return is_iso8601(s) || is_rfc1123(s);
}

bool is_locale_tag(std::string_view s) {
  if (s.size() == 2) return is_alpha(s[0]) && is_alpha(s[1]);
  return s.size() == 5 && is_alpha(s[0]) && is_alpha(s[1]) && (s[2] == '-' || s[2] == '_') &&
         is_alpha(s[3]) && is_alpha(s[4]);
}

bool is_consent_cookie(std::string_view cookie_name, const FilterConfig& cfg) {
  return cfg.consent_cookie_names.contains(to_lower(cookie_name));
}

std::optional<FilterReason> filter_reason(std::string_view s, const FilterConfig& cfg) {
  const std::string lower = to_lower(s);
  if (cfg.keyword_blacklist.contains(lower)) return FilterReason::kKeyword;
  if (is_timestamp_like(s)) return FilterReason::kDateOrTimestamp;
  if (is_locale_tag(s)) return FilterReason::kLocale;
  for (const std::string& suffix : cfg.file_extension_suffixes) {
    if (lower.ends_with(suffix)) return FilterReason::kFileExtension;
  }
  if (lower.starts_with("www.") || lower.starts_with("http://") ||
      lower.starts_with("https://")) {
    return FilterReason::kUrl;
  }
  if (s.size() < cfg.min_length) return FilterReason::kTooShort;
  return std::nullopt;
}

std::vector<CandidateId> candidate_ids(const SiteCapture& capture, const FilterConfig& cfg) {
  std::vector<CandidateId> out;
  std::set<std::pair<std::string, std::string>> seen;  // (value, owner)
  for (const CookieRecord& cookie : capture.cookies) {
    if (is_consent_cookie(cookie.name, cfg)) continue;
    for (std::string& value : extract_values(cookie.value, cfg)) {
      if (!is_plausible_id(value, cfg)) continue;
      if (!seen.emplace(value, cookie.set_by).second) continue;
      out.push_back(CandidateId{std::move(value), cookie.set_by, cookie.name, cookie.party});
    }
  }
  return out;
}

}  // namespace consent_audit
