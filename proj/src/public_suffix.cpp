#include "consent_audit/public_suffix.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "consent_audit/strings.hpp"
#include "embedded_data.hpp"

namespace consent_audit {

PublicSuffixList PublicSuffixList::from_text(std::string_view dat) {
  PublicSuffixList list;
  std::size_t pos = 0;
  while (pos <= dat.size()) {
    std::size_t eol = dat.find('\n', pos);
    if (eol == std::string_view::npos) eol = dat.size();
    std::string_view line = dat.substr(pos, eol - pos);
    pos = eol + 1;
    // A rule is the first whitespace-delimited token on the line.
    line = trim(line);
    if (line.empty() || line.starts_with("//")) continue;
    if (const auto sp = line.find_first_of(" \t"); sp != std::string_view::npos) {
      line = line.substr(0, sp);
    }
    std::string rule = to_lower(line);
    if (rule.starts_with('!')) {
      list.exceptions_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      list.wildcards_.insert(rule.substr(2));
    } else {
      list.rules_.insert(std::move(rule));
    }
  }
  return list;
}

PublicSuffixList PublicSuffixList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read public suffix list: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

PublicSuffixList PublicSuffixList::bundled() {
  return from_text(embedded::public_suffix_list());
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
  // Candidate suffixes from longest (whole host) to shortest (last label).
  std::size_t start = 0;
  while (true) {
    const std::string_view candidate = host.substr(start);
    const std::string key(candidate);
    if (exceptions_.contains(key)) {
      // An exception rule makes its parent the public suffix.
      const auto dot = candidate.find('.');
      return std::string(dot == std::string_view::npos ? candidate : candidate.substr(dot + 1));
    }
    if (rules_.contains(key)) return key;
    if (const auto dot = candidate.find('.'); dot != std::string_view::npos) {
      if (wildcards_.contains(std::string(candidate.substr(dot + 1)))) return key;
      start += dot + 1;
    } else {
      // Implicit "*" rule.
      return key;
    }
  }
}

std::string PublicSuffixList::registrable_domain(std::string_view raw_host) const {
  const std::string host = normalize_host(raw_host);
  if (host.empty() || is_ip_literal(host) || host.find('.') == std::string::npos) return host;
  const std::string suffix = public_suffix(host);
  if (suffix.size() >= host.size()) return host;
  // host = <prefix>.<suffix>; keep the last label of the prefix.
  const std::string_view prefix = std::string_view(host).substr(0, host.size() - suffix.size() - 1);
  const auto dot = prefix.rfind('.');
  return dot == std::string_view::npos ? host : host.substr(dot + 1);
}

std::string normalize_host(std::string_view host) {
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  while (!host.empty() && host.back() == '.') host.remove_suffix(1);
  while (!host.empty() && host.front() == '.') host.remove_prefix(1);
  return to_lower(host);
}

bool is_ip_literal(std::string_view host) {
  if (host.find(':') != std::string_view::npos) return true;  // IPv6
  int parts = 0;
  for (std::string_view p : split_any(host, ".")) {
    if (p.empty() || p.size() > 3) return false;
    for (char c : p) {
      if (c < '0' || c > '9') return false;
    }
    ++parts;
  }
  return parts == 4;
}

namespace {

struct ListHolder {
  std::mutex mu;
  std::vector<std::unique_ptr<PublicSuffixList>> retired;
  std::atomic<const PublicSuffixList*> current{nullptr};
};

ListHolder& holder() {
  static ListHolder h;
  return h;
}

}  // namespace

const PublicSuffixList& active_public_suffix_list() {
  ListHolder& h = holder();
  if (const auto* p = h.current.load(std::memory_order_acquire)) return *p;
  std::lock_guard lock(h.mu);
  if (const auto* p = h.current.load(std::memory_order_relaxed)) return *p;
  std::unique_ptr<PublicSuffixList> list;
  if (const char* env = std::getenv("CONSENT_AUDIT_PSL"); env != nullptr && *env != '\0') {
    list = std::make_unique<PublicSuffixList>(PublicSuffixList::from_file(env));
  } else {
    list = std::make_unique<PublicSuffixList>(PublicSuffixList::bundled());
  }
  h.current.store(list.get(), std::memory_order_release);
  h.retired.push_back(std::move(list));
  return *h.current.load(std::memory_order_relaxed);
}

void install_public_suffix_list(PublicSuffixList list) {
  ListHolder& h = holder();
  std::lock_guard lock(h.mu);
  auto owned = std::make_unique<PublicSuffixList>(std::move(list));
  h.current.store(owned.get(), std::memory_order_release);
  // Old lists stay alive: references handed out earlier must remain valid.
  h.retired.push_back(std::move(owned));
}

std::string etld_plus_one(std::string_view host) {
  return active_public_suffix_list().registrable_domain(host);
}

Party classify_party(std::string_view cookie_domain, std::string_view site_etld1) {
  return etld_plus_one(cookie_domain) == normalize_host(site_etld1) ? Party::kFirst
                                                                    : Party::kThird;
}

}  // namespace consent_audit
