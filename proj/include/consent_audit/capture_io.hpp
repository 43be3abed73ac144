#ifndef CONSENT_AUDIT_CAPTURE_IO_HPP_
#define CONSENT_AUDIT_CAPTURE_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consent_audit/types.hpp"

namespace consent_audit {

inline constexpr int kCaptureSchemaVersion = 1;

// Parses one capture document (schema version 1) and validates it.
// Duplicate cookies (same name, domain, path) keep the last record and add a
// message to `warnings` when provided.
// Throws SchemaError naming the JSON path, or VersionError.
SiteCapture parse_capture(std::string_view json_text,
                          std::vector<std::string>* warnings = nullptr);

// Canonical, deterministic encoding of a capture. parse_capture() of the
// result yields the same value.
std::string serialize_capture(const SiteCapture& capture);

// Checks every SiteCapture invariant; throws SchemaError on the first
// violation.
void validate_capture(const SiteCapture& capture);

// What a HAR log does not carry.
struct HarMeta {
  std::string site_url;
  ConsentAction consent_action = ConsentAction::kNoAction;
  std::optional<std::uint64_t> rank;
  std::optional<std::string> cc_tld;
  std::optional<std::string> cmp_info;
};

// Sidecar JSON: {"site_url": ..., "consent_action": ..., "rank": ...}.
HarMeta parse_har_meta(std::string_view json_text);

// Maps every HAR 1.2 entry to an HttpRequest; Set-Cookie response headers
// become cookie records attributed to the responding host's registrable
// domain. Throws SchemaError on malformed HAR.
SiteCapture import_har(std::string_view har_text, const HarMeta& meta,
                       std::vector<std::string>* warnings = nullptr);

// "<etld1>.<action>.capture.json"
std::string capture_file_name(const SiteCapture& capture);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_CAPTURE_IO_HPP_
