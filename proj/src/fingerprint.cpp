#include "consent_audit/fingerprint.hpp"

namespace consent_audit {

std::set<std::string> default_sentinels() {
  return {"getCanvasFp", "getWebglFp", "Fingerprint2", "Fingerprint2.get"};
}

FingerprintFinding detect_fingerprinting(const ProfileTrace& trace,
                                         const std::set<std::string>& sentinels) {
  FingerprintFinding finding;
  for (const ProfileNode& node : trace.nodes) {
    if (node.hit_count == 0 || !sentinels.contains(node.function_name)) continue;
    finding.matched_functions.insert(node.function_name);
    if (!node.script_url.empty()) finding.scripts.insert(node.script_url);
  }
  finding.detected = !finding.matched_functions.empty();
  return finding;
}

std::string_view to_string(FpCategory category) {
  switch (category) {
    case FpCategory::kAllThree:
      return "AllThree";
    case FpCategory::kOnlyAccept:
      return "OnlyAccept";
    case FpCategory::kOnlyReject:
      return "OnlyReject";
    case FpCategory::kWaitForAction:
      return "WaitForAction";
    case FpCategory::kOnlyNoAction:
      return "OnlyNoAction";
    case FpCategory::kOther:
      return "Other";
    case FpCategory::kNone:
      return "None";
  }
  return "None";
}

FpCategory classify_fp_category(const std::map<ConsentAction, bool>& flags) {
  const auto flag = [&](ConsentAction a) {
    const auto it = flags.find(a);
    return it != flags.end() && it->second;
  };
  const bool none = flag(ConsentAction::kNoAction);
  const bool reject = flag(ConsentAction::kRejectAll);
  const bool accept = flag(ConsentAction::kAcceptAll);
  if (none && reject && accept) return FpCategory::kAllThree;
  if (!none && !reject && !accept) return FpCategory::kNone;
  if (!none && reject && accept) return FpCategory::kWaitForAction;
  if (!none && !reject && accept) return FpCategory::kOnlyAccept;
  if (!none && reject && !accept) return FpCategory::kOnlyReject;
  if (none && !reject && !accept) return FpCategory::kOnlyNoAction;
  return FpCategory::kOther;
}

}  // namespace consent_audit
