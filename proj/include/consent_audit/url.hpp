#ifndef CONSENT_AUDIT_URL_HPP_
#define CONSENT_AUDIT_URL_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace consent_audit {

// Components of an absolute hierarchical URL ("scheme://authority/path?query#fragment").
// Components are kept in their raw (still percent-encoded) form.
struct Url {
  std::string scheme;  // lowercase
  std::string host;    // normalized: lowercase, no brackets, no trailing dot
  std::optional<std::string> port;
  std::string path;  // starts with '/' or is empty
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

std::optional<Url> try_parse_url(std::string_view text);
// Throws ParseError when `text` is not an absolute URL with a host.
Url parse_url(std::string_view text);

// Decodes %XX escapes. Malformed escapes are kept verbatim; '+' is not
// treated as a space.
std::string percent_decode(std::string_view text);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_URL_HPP_
