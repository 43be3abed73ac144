#ifndef CONSENT_AUDIT_TYPES_HPP_
#define CONSENT_AUDIT_TYPES_HPP_

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace consent_audit {

// Declaration order is the report column order.
enum class ConsentAction : std::uint8_t { kNoAction = 0, kRejectAll = 1, kAcceptAll = 2 };

inline constexpr std::array<ConsentAction, 3> kAllActions = {
    ConsentAction::kNoAction, ConsentAction::kRejectAll, ConsentAction::kAcceptAll};

std::string_view to_string(ConsentAction action);
std::optional<ConsentAction> parse_consent_action(std::string_view text);
// Short form used in capture file names: "noaction", "rejectall", "acceptall".
std::string_view file_tag(ConsentAction action);

enum class Party : std::uint8_t { kFirst = 0, kThird = 1 };

std::string_view to_string(Party party);
std::optional<Party> parse_party(std::string_view text);

enum class ResourceType : std::uint8_t { kScript, kXhr, kDocument, kImage, kOther };

std::string_view to_string(ResourceType type);
std::optional<ResourceType> parse_resource_type(std::string_view text);

// Ordered header list; lookups are case-insensitive on the name.
class HeaderMap {
 public:
  using Entry = std::pair<std::string, std::string>;

  HeaderMap() = default;
  explicit HeaderMap(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  void add(std::string name, std::string value);
  // First value whose name matches case-insensitively.
  std::optional<std::string_view> find(std::string_view name) const;
  std::vector<std::string_view> find_all(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const HeaderMap&, const HeaderMap&) = default;

 private:
  std::vector<Entry> entries_;
};

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  HeaderMap headers;
  std::optional<std::string> body;
  std::optional<ResourceType> resource_type;

  friend bool operator==(const HttpRequest&, const HttpRequest&) = default;
};

struct CookieRecord {
  std::string name;
  std::string value;
  std::string domain;  // leading dot stripped
  std::string path = "/";
  std::string set_by;  // eTLD+1 of the setting party
  Party party = Party::kFirst;

  friend bool operator==(const CookieRecord&, const CookieRecord&) = default;
};

struct ProfileNode {
  std::string function_name;
  std::string script_url;
  std::uint64_t hit_count = 0;

  friend bool operator==(const ProfileNode&, const ProfileNode&) = default;
};

inline constexpr std::uint32_t kDefaultSamplingIntervalUs = 500;

struct ProfileTrace {
  std::vector<ProfileNode> nodes;
  std::uint32_t sampling_interval_us = kDefaultSamplingIntervalUs;

  friend bool operator==(const ProfileTrace&, const ProfileTrace&) = default;
};

using Timestamp = std::chrono::sys_seconds;

std::string format_timestamp(Timestamp t);
// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)". Fractional seconds are dropped.
std::optional<Timestamp> parse_timestamp(std::string_view text);

struct SiteCapture {
  std::string site_url;
  std::string site_etld1;
  std::optional<std::uint64_t> rank;
  std::optional<std::string> cc_tld;
  ConsentAction consent_action = ConsentAction::kNoAction;
  std::optional<std::string> cmp_info;
  std::vector<HttpRequest> requests;
  std::vector<CookieRecord> cookies;
  std::optional<ProfileTrace> profile;
  Timestamp capture_time{};
  std::optional<std::string> html;  // stored, never analysed

  friend bool operator==(const SiteCapture&, const SiteCapture&) = default;
};

// Error hierarchy. Every error carries a human-readable message; SchemaError
// additionally names the offending JSON path.
class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public AuditError {
 public:
  SchemaError(std::string path, const std::string& what)
      : AuditError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class VersionError : public AuditError {
 public:
  using AuditError::AuditError;
};

class ParseError : public AuditError {
 public:
  using AuditError::AuditError;
};

class EmptyInputError : public AuditError {
 public:
  using AuditError::AuditError;
};

class DegenerateInputError : public AuditError {
 public:
  using AuditError::AuditError;
};

class InconsistentSiteError : public AuditError {
 public:
  using AuditError::AuditError;
};

class EmptyCorpusError : public AuditError {
 public:
  using AuditError::AuditError;
};

// Unreadable or unwritable files and directories.
class IoError : public AuditError {
 public:
  using AuditError::AuditError;
};

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_TYPES_HPP_
