#ifndef CONSENT_AUDIT_PUBLIC_SUFFIX_HPP_
#define CONSENT_AUDIT_PUBLIC_SUFFIX_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

#include "consent_audit/types.hpp"

namespace consent_audit {

// Rules from a public_suffix_list.dat file: plain, wildcard ("*.ck") and
// exception ("!www.ck") entries, both ICANN and private sections.
class PublicSuffixList {
 public:
  static PublicSuffixList from_text(std::string_view dat);
  static PublicSuffixList from_file(const std::filesystem::path& path);
  // The snapshot compiled into the library.
  static PublicSuffixList bundled();

  // Public suffix of a normalized host (lowercase, no trailing dot). Hosts
  // with no matching rule fall back to their last label.
  std::string public_suffix(std::string_view host) const;

  // Registrable domain: public suffix plus one label. IP literals,
  // single-label hosts and hosts that are themselves a public suffix are
  // returned unchanged.
  std::string registrable_domain(std::string_view host) const;

  std::size_t rule_count() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // stored without the "*." prefix
  std::unordered_set<std::string> exceptions_;  // stored without the "!" prefix
};

// Lowercases, strips leading/trailing dots and IPv6 brackets.
std::string normalize_host(std::string_view host);
bool is_ip_literal(std::string_view host);

// Process-wide list used by the free functions below. Initialized on first
// use from $CONSENT_AUDIT_PSL when set, otherwise from the bundled snapshot.
const PublicSuffixList& active_public_suffix_list();
// Replaces the process-wide list. Intended for start-up (CLI flag); lookups
// already in flight keep using the previous list.
void install_public_suffix_list(PublicSuffixList list);

std::string etld_plus_one(std::string_view host);
Party classify_party(std::string_view cookie_domain, std::string_view site_etld1);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_PUBLIC_SUFFIX_HPP_
