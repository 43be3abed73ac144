#ifndef CONSENT_AUDIT_ID_EXTRACTION_HPP_
#define CONSENT_AUDIT_ID_EXTRACTION_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "consent_audit/types.hpp"

namespace consent_audit {

// A cookie-derived string that may identify the user.
struct CandidateId {
  std::string value;
  std::string owner;  // registrable domain that assigned it
  std::string source_cookie;
  Party party = Party::kFirst;

  friend bool operator==(const CandidateId&, const CandidateId&) = default;
  friend auto operator<=>(const CandidateId&, const CandidateId&) = default;
};

struct FilterConfig {
  std::set<std::string> keyword_blacklist;  // lowercase
  std::set<std::string> consent_cookie_names;
  std::size_t min_length = 6;
  std::set<char> split_delimiters{'&', ';'};
  std::set<std::string> file_extension_suffixes;  // lowercase, with leading dot

  // Bundled keyword list, the four consent cookie names and common web
  // asset extensions.
  static FilterConfig defaults();

  // Throws AuditError when min_length is 0 or no delimiter is configured.
  void check() const;

  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

// Keyword list text: one token per line, '#' starts a comment line.
std::set<std::string> parse_keyword_list(std::string_view text);
std::string_view bundled_keyword_list();

// Every candidate value in a raw cookie value. JSON objects and arrays yield
// their leaf strings and numbers from all nesting levels (never keys); other
// values yield themselves followed by their delimiter-split fragments.
// Duplicates are dropped, first occurrence kept.
std::vector<std::string> extract_values(std::string_view raw, const FilterConfig& cfg);

enum class FilterReason {
  kKeyword,
  kDateOrTimestamp,
  kLocale,
  kFileExtension,
  kUrl,
  kTooShort,
};

std::string_view to_string(FilterReason reason);

// First filter that rejects `s`, or nullopt when `s` may be an identifier.
std::optional<FilterReason> filter_reason(std::string_view s, const FilterConfig& cfg);

inline bool is_plausible_id(std::string_view s, const FilterConfig& cfg) {
  return !filter_reason(s, cfg).has_value();
}

bool is_timestamp_like(std::string_view s);
bool is_locale_tag(std::string_view s);
bool is_consent_cookie(std::string_view cookie_name, const FilterConfig& cfg);

// Candidate identifiers of one capture, deduplicated by (value, owner) in
// cookie order.
std::vector<CandidateId> candidate_ids(const SiteCapture& capture, const FilterConfig& cfg);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_ID_EXTRACTION_HPP_
