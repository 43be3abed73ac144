#ifndef CONSENT_AUDIT_ORACLE_HPP_
#define CONSENT_AUDIT_ORACLE_HPP_

#include <span>
#include <string>
#include <vector>

#include "consent_audit/analytics.hpp"
#include "consent_audit/leak_detection.hpp"

// Brute-force reference implementations. They share output types with the
// pipeline but none of its indexing, tokenizer or accumulator code, and are
// meant for small inputs only (tests and the self-check command).
namespace consent_audit::oracle {

// Naive URL split: path segments and query fragments (with k=v values),
// raw and percent-decoded. Empty when `url` has no "scheme://host" prefix.
std::vector<std::string> naive_url_tokens(const std::string& url, const std::string& delimiters);

// For every (id, request, channel): scan tokens or body bytes directly.
std::vector<LeakEvent> detect_leaks(const SiteCapture& capture, std::span<const CandidateId> ids,
                                    const FilterConfig& cfg);

// Recomputes every CorpusStats field from its definition, site by site.
CorpusStats aggregate(std::span<const SiteAudits> corpus, const AnalyticsConfig& cfg = {});

}  // namespace consent_audit::oracle

#endif  // CONSENT_AUDIT_ORACLE_HPP_
