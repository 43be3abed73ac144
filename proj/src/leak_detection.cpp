#include "consent_audit/leak_detection.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "consent_audit/public_suffix.hpp"
#include "consent_audit/strings.hpp"
#include "consent_audit/url.hpp"

namespace consent_audit {

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::kUrlParam:
      return "UrlParam";
    case Channel::kBody:
      return "Body";
    case Channel::kReferrer:
      return "Referrer";
  }
  return "UrlParam";
}

std::optional<Channel> parse_channel(std::string_view text) {
  for (Channel c : kAllChannels) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

bool event_order(const LeakEvent& a, const LeakEvent& b) {
  return std::tie(a.request_index, a.channel, a.id, a.recipient) <
         std::tie(b.request_index, b.channel, b.id, b.recipient);
}

namespace {

class TokenList {
 public:
  void add(std::string_view raw) {
    if (raw.empty()) return;
    push(std::string(raw));
    std::string decoded = percent_decode(raw);
    if (decoded != raw) push(std::move(decoded));
  }
  std::vector<std::string> take() && { return std::move(tokens_); }

 private:
  void push(std::string token) {
    if (token.empty() || !seen_.insert(token).second) return;
    tokens_.push_back(std::move(token));
  }
  std::vector<std::string> tokens_;
  std::unordered_set<std::string> seen_;
};

std::vector<std::string> tokenize(const Url& url, const std::string& delims) {
  TokenList tokens;
  for (std::string_view segment : split_any(url.path, "/")) tokens.add(segment);
  if (url.query) {
    for (std::string_view fragment : split_any(*url.query, delims)) {
      tokens.add(fragment);
      if (const auto eq = fragment.find('='); eq != std::string_view::npos) {
        tokens.add(fragment.substr(eq + 1));
      }
    }
  }
  return std::move(tokens).take();
}

std::string delimiter_string(const std::set<char>& delimiters) {
  return std::string(delimiters.begin(), delimiters.end());
}

std::optional<std::string_view> referer_of(const HttpRequest& request) {
  return request.headers.find("referer");
}

// Request features shared by every identifier lookup.
struct PreparedRequest {
  std::string recipient;
  std::optional<std::string_view> opaque_referrer;  // Referer that is not a URL
};

}  // namespace

std::vector<std::string> tokenize_url(std::string_view url, const std::set<char>& delimiters) {
  return tokenize(parse_url(url), delimiter_string(delimiters));
}

ChannelSet find_id_in_request(const CandidateId& id, const HttpRequest& request,
                              const FilterConfig& cfg) {
  ChannelSet channels;
  const std::string delims = delimiter_string(cfg.split_delimiters);
  if (const auto url = try_parse_url(request.url)) {
    const auto tokens = tokenize(*url, delims);
    if (std::find(tokens.begin(), tokens.end(), id.value) != tokens.end()) {
      channels.insert(Channel::kUrlParam);
    }
  }
  if (request.body && request.body->find(id.value) != std::string::npos) {
    channels.insert(Channel::kBody);
  }
  if (const auto referer = referer_of(request)) {
    if (const auto url = try_parse_url(*referer)) {
      const auto tokens = tokenize(*url, delims);
      if (std::find(tokens.begin(), tokens.end(), id.value) != tokens.end()) {
        channels.insert(Channel::kReferrer);
      }
    } else if (referer->find(id.value) != std::string_view::npos) {
      channels.insert(Channel::kReferrer);
    }
  }
  return channels;
}

std::vector<LeakEvent> detect_leaks(const SiteCapture& capture, std::span<const CandidateId> ids,
                                    const FilterConfig& cfg) {
  std::vector<LeakEvent> events;
  if (ids.empty() || capture.requests.empty()) return events;

  const std::string delims = delimiter_string(cfg.split_delimiters);
  std::vector<PreparedRequest> prepared(capture.requests.size());
  // Token -> indices of requests carrying it, per channel.
  std::unordered_map<std::string, std::vector<std::size_t>> url_index;
  std::unordered_map<std::string, std::vector<std::size_t>> referrer_index;
  std::vector<std::size_t> with_body;
  std::vector<std::size_t> with_opaque_referrer;

  for (std::size_t i = 0; i < capture.requests.size(); ++i) {
    const HttpRequest& req = capture.requests[i];
    const auto url = try_parse_url(req.url);
    if (!url) continue;  // validated captures never hit this
    prepared[i].recipient = etld_plus_one(url->host);
    for (std::string& t : tokenize(*url, delims)) url_index[std::move(t)].push_back(i);
    if (req.body && !req.body->empty()) with_body.push_back(i);
    if (const auto referer = referer_of(req)) {
      if (const auto ref_url = try_parse_url(*referer)) {
        for (std::string& t : tokenize(*ref_url, delims)) referrer_index[std::move(t)].push_back(i);
      } else {
        prepared[i].opaque_referrer = *referer;
        with_opaque_referrer.push_back(i);
      }
    }
  }

  const auto emit = [&](const CandidateId& id, std::size_t i, Channel channel) {
    const std::string& recipient = prepared[i].recipient;
    if (recipient.empty() || recipient == id.owner) return;
    if (id.party == Party::kFirst && recipient == capture.site_etld1) return;
    events.push_back(LeakEvent{id, recipient, channel, i});
  };

  for (const CandidateId& id : ids) {
    if (const auto it = url_index.find(id.value); it != url_index.end()) {
      for (std::size_t i : it->second) emit(id, i, Channel::kUrlParam);
    }
    for (std::size_t i : with_body) {
      if (capture.requests[i].body->find(id.value) != std::string::npos) {
        emit(id, i, Channel::kBody);
      }
    }
    if (const auto it = referrer_index.find(id.value); it != referrer_index.end()) {
      for (std::size_t i : it->second) emit(id, i, Channel::kReferrer);
    }
    for (std::size_t i : with_opaque_referrer) {
      if (prepared[i].opaque_referrer->find(id.value) != std::string_view::npos) {
        emit(id, i, Channel::kReferrer);
      }
    }
  }
  std::sort(events.begin(), events.end(), event_order);
  // Duplicate ids in the input would repeat events.
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

namespace {

std::set<std::string> third_party_hosts(const SiteCapture& capture) {
  const bool typed = std::any_of(capture.requests.begin(), capture.requests.end(),
                                 [](const HttpRequest& r) { return r.resource_type.has_value(); });
  std::set<std::string> parties;
  for (const HttpRequest& req : capture.requests) {
    if (typed && req.resource_type != ResourceType::kScript) continue;
    const auto url = try_parse_url(req.url);
    if (!url) continue;
    std::string party = etld_plus_one(url->host);
    if (party != capture.site_etld1) parties.insert(std::move(party));
  }
  return parties;
}

}  // namespace

std::size_t third_party_count(const SiteCapture& capture) {
  return third_party_hosts(capture).size();
}

void summarize_events(SiteAudit& audit) {
  audit.recipients_per_id.clear();
  audit.first_party_leak = false;
  audit.third_party_sync = false;
  for (const LeakEvent& e : audit.leak_events) {
    audit.recipients_per_id[e.id].insert(e.recipient);
    if (e.id.party == Party::kFirst) {
      audit.first_party_leak = true;
    } else {
      audit.third_party_sync = true;
    }
  }
}

SiteAudit audit_capture(const SiteCapture& capture, const DetectionConfig& cfg) {
  SiteAudit audit;
  audit.site_etld1 = capture.site_etld1;
  audit.consent_action = capture.consent_action;
  audit.rank = capture.rank;
  audit.cc_tld = capture.cc_tld;
  const auto ids = candidate_ids(capture, cfg.filter);
  audit.leak_events = detect_leaks(capture, ids, cfg.filter);
  summarize_events(audit);

  std::set<std::string> parties = third_party_hosts(capture);
  for (const LeakEvent& e : audit.leak_events) {
    if (e.recipient != capture.site_etld1) parties.insert(e.recipient);
  }
  audit.third_party_count = parties.size();

  if (capture.profile) audit.fingerprinting = detect_fingerprinting(*capture.profile, cfg.sentinels);
  return audit;
}

std::map<ConsentAction, SiteAudit> audit_site(std::span<const SiteCapture> captures,
                                              const DetectionConfig& cfg) {
  std::map<ConsentAction, SiteAudit> out;
  if (captures.empty()) return out;
  const std::string& site = captures.front().site_etld1;
  for (const SiteCapture& capture : captures) {
    if (capture.site_etld1 != site) {
      throw InconsistentSiteError("captures of different sites grouped together: " + site +
                                  " vs " + capture.site_etld1);
    }
    if (out.contains(capture.consent_action)) {
      throw InconsistentSiteError("site " + site + " has more than one " +
                                  std::string(to_string(capture.consent_action)) + " capture");
    }
    out.emplace(capture.consent_action, audit_capture(capture, cfg));
  }
  return out;
}

}  // namespace consent_audit
