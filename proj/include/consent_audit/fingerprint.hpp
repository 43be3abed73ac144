#ifndef CONSENT_AUDIT_FINGERPRINT_HPP_
#define CONSENT_AUDIT_FINGERPRINT_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "consent_audit/types.hpp"

namespace consent_audit {

// Function names emitted by FingerprintJS when it fingerprints a browser.
// V8 names the frame of `Fingerprint2.get = function ...` "Fingerprint2.get";
// a bare "get" is too common to be a default sentinel and must be added
// through the config when a profiler reports it that way.
std::set<std::string> default_sentinels();

struct FingerprintFinding {
  bool detected = false;
  std::set<std::string> matched_functions;
  std::set<std::string> scripts;

  friend bool operator==(const FingerprintFinding&, const FingerprintFinding&) = default;
};

// Detected iff some node with hit_count >= 1 has a function name in
// `sentinels` (exact match).
FingerprintFinding detect_fingerprinting(const ProfileTrace& trace,
                                         const std::set<std::string>& sentinels);

// Per-site behaviour across the three visits.
enum class FpCategory {
  kAllThree,
  kOnlyAccept,
  kOnlyReject,
  kWaitForAction,  // RejectAll and AcceptAll, but not NoAction
  kOnlyNoAction,
  kOther,
  kNone,
};

inline constexpr FpCategory kAllFpCategories[] = {
    FpCategory::kAllThree,     FpCategory::kOnlyAccept, FpCategory::kOnlyReject,
    FpCategory::kWaitForAction, FpCategory::kOnlyNoAction, FpCategory::kOther,
    FpCategory::kNone};

std::string_view to_string(FpCategory category);

// Missing actions count as "not detected".
FpCategory classify_fp_category(const std::map<ConsentAction, bool>& flags);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_FINGERPRINT_HPP_
