#include "consent_audit/fixtures.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <set>
#include <utility>

#include "consent_audit/capture_io.hpp"
#include "consent_audit/corpus.hpp"
#include "consent_audit/public_suffix.hpp"
#include "consent_audit/report.hpp"

namespace consent_audit {

using nlohmann::json;
using Rng = std::mt19937_64;

std::string_view to_string(FixtureProfile profile) {
  return profile == FixtureProfile::kBasic ? "basic" : "edge-cases";
}

std::optional<FixtureProfile> parse_fixture_profile(std::string_view text) {
  if (text == "basic") return FixtureProfile::kBasic;
  if (text == "edge-cases") return FixtureProfile::kEdgeCases;
  return std::nullopt;
}

namespace {

// Only raw engine output is used (no distributions), so the bytes generated
// for a seed do not depend on the standard library implementation.
std::uint64_t below(Rng& rng, std::uint64_t n) { return rng() % n; }
bool chance(Rng& rng, unsigned percent) { return below(rng, 100) < percent; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

template <typename T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

std::string hex(Rng& rng, std::size_t n) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(n, '0');
  for (char& c : s) c = kHex[below(rng, 16)];
  return s;
}

std::string uuid(Rng& rng) {
  return hex(rng, 8) + "-" + hex(rng, 4) + "-4" + hex(rng, 3) + "-" + hex(rng, 4) + "-" +
         hex(rng, 12);
}

std::string word(Rng& rng, int syllables) {
  static constexpr std::string_view kConsonants = "bcdfghklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w += kConsonants[below(rng, kConsonants.size())];
    w += kVowels[below(rng, kVowels.size())];
  }
  return w;
}

std::string digits(Rng& rng, std::size_t n) {
  std::string s(n, '0');
  s[0] = static_cast<char>('1' + below(rng, 9));
  for (std::size_t i = 1; i < n; ++i) s[i] = static_cast<char>('0' + below(rng, 10));
  return s;
}

const std::vector<std::string> kSiteTlds = {"com", "fr", "de", "it", "es", "co.uk",
                                            "nl", "be", "org", "net", "com.br", "pl"};
const std::vector<std::string> kTrackerTlds = {"com", "net", "io"};
const std::vector<std::string> kCmps = {"OneTrust", "Quantcast", "Didomi", "Cookiebot", "Sourcepoint"};

Timestamp capture_time(std::size_t site_index, ConsentAction action) {
  using namespace std::chrono;
  const Timestamp base = sys_days{year{2023} / March / 1};
  return base + seconds(3600 * static_cast<std::int64_t>(site_index) +
                        120 * static_cast<std::int64_t>(action));
}

// Registrable domains for synthetic third parties, never reused.
class DomainPool {
 public:
  explicit DomainPool(std::set<std::string> reserved) : used_(std::move(reserved)) {}
  std::string fresh(Rng& rng) {
    while (true) {
      std::string d = word(rng, 3) + "." + pick(rng, kTrackerTlds);
      if (used_.insert(d).second) return d;
    }
  }
  void reserve(const std::string& d) { used_.insert(d); }

 private:
  std::set<std::string> used_;
};

// Builds one capture and records, as it goes, every leak event it plants.
class ScriptedCapture {
 public:
  ScriptedCapture(const std::string& site, ConsentAction action, std::size_t site_index) {
    capture_.site_url = "https://www." + site + "/";
    capture_.site_etld1 = site;
    capture_.consent_action = action;
    capture_.capture_time = capture_time(site_index, action);
  }

  SiteCapture& capture() { return capture_; }
  const std::string& site() const { return capture_.site_etld1; }

  // `domain` must be a host under `owner`.
  CandidateId cookie(const std::string& name, const std::string& raw_value, const std::string& domain,
                     const std::string& owner, const std::string& id_value = {}) {
    CookieRecord c;
    c.name = name;
    c.value = raw_value;
    c.domain = domain;
    c.set_by = owner;
    c.party = owner == site() ? Party::kFirst : Party::kThird;
    capture_.cookies.push_back(c);
    return CandidateId{id_value.empty() ? raw_value : id_value, owner, name, c.party};
  }

  void request(HttpRequest r, const std::string& party) {
    if (!r.headers.find("referer")) r.headers.add("Referer", capture_.site_url);
    if (r.resource_type == ResourceType::kScript && party != site()) scripts_.insert(party);
    planned_.push_back({std::move(r), std::nullopt});
  }

  void script(Rng& rng, const std::string& sub, const std::string& domain) {
    HttpRequest r;
    r.url = "https://" + sub + "." + domain + "/" + pick(rng, kScriptPaths) +
            "?v=" + std::to_string(1 + below(rng, 9));
    r.resource_type = ResourceType::kScript;
    request(std::move(r), domain);
  }

  void pixel(Rng& rng, const std::string& domain) {
    HttpRequest r;
    r.url = "https://px." + domain + "/p?e=" + pick(rng, kEvents) +
            "&cb=" + digits(rng, 1 + below(rng, 6));
    r.resource_type = ResourceType::kImage;
    request(std::move(r), domain);
  }

  // One request to `sub.domain` carrying `id` in `channel`.
  void deliver(Rng& rng, const CandidateId& id, const std::string& sub, const std::string& domain,
               Channel channel) {
    const std::string host = sub.empty() ? domain : sub + "." + domain;
    HttpRequest r;
    switch (channel) {
      case Channel::kUrlParam:
        switch (below(rng, 3)) {
          case 0:
            r.url = "https://" + host + "/sync?uid=" + id.value + "&cb=" + digits(rng, 5);
            break;
          case 1:
            r.url = "https://" + host + "/match/" + id.value + "/px";
            break;
          default:
            r.url = "https://" + host + "/i?partner=" + word(rng, 2) + ";puid=" + id.value;
            break;
        }
        break;
      case Channel::kBody:
        r.method = "POST";
        r.url = "https://" + host + "/collect";
        r.body = chance(rng, 50) ? "{\"uid\":\"" + id.value + "\",\"ev\":\"view\"}"
                                 : "uid=" + id.value + "&ev=pageview";
        break;
      case Channel::kReferrer:
        r.url = "https://" + host + "/ad?slot=" + std::to_string(below(rng, 20));
        r.headers.add("Referer", capture_.site_url + "article?ref=" + id.value);
        break;
    }
    r.resource_type = chance(rng, 50) ? ResourceType::kImage : ResourceType::kXhr;
    std::optional<LeakEvent> event;
    const bool to_owner = domain == id.owner;
    const bool first_party_home = id.party == Party::kFirst && domain == site();
    if (!to_owner && !first_party_home) event = LeakEvent{id, domain, channel, 0};
    if (event && domain != site()) recipients_.insert(domain);
    if (!r.headers.find("referer")) r.headers.add("Referer", capture_.site_url);
    planned_.push_back({std::move(r), std::move(event)});
  }

  void first_party_traffic(Rng& rng) {
    HttpRequest doc;
    doc.url = capture_.site_url;
    doc.resource_type = ResourceType::kDocument;
    doc.headers.add("Accept", "text/html");
    request(std::move(doc), site());
    for (std::uint64_t i = 0, n = 1 + below(rng, 3); i < n; ++i) script(rng, "static", site());
    for (std::uint64_t i = 0, n = below(rng, 3); i < n; ++i) {
      HttpRequest img;
      img.url = "https://www." + site() + "/img/" + word(rng, 2) + ".jpg";
      img.resource_type = ResourceType::kImage;
      request(std::move(img), site());
    }
  }

  std::size_t third_parties() const {
    std::set<std::string> all = scripts_;
    all.insert(recipients_.begin(), recipients_.end());
    return all.size();
  }

  bool is_third_party(const std::string& domain) const {
    return scripts_.contains(domain) || recipients_.contains(domain);
  }

  void profile(Rng& rng, bool fingerprinting, const std::string& script_domain) {
    ProfileTrace trace;
    const std::string script_url = "https://cdn." + script_domain + "/fp.js";
    for (std::uint64_t i = 0, n = 3 + below(rng, 6); i < n; ++i) {
      trace.nodes.push_back(ProfileNode{pick(rng, kDecoys), "https://static." + site() + "/app.js",
                                        below(rng, 40)});
    }
    if (fingerprinting) {
      trace.nodes.push_back(ProfileNode{pick(rng, kSentinels), script_url, 1 + below(rng, 20)});
    } else if (chance(rng, 20)) {
      // Present in the call tree but never sampled.
      trace.nodes.push_back(ProfileNode{pick(rng, kSentinels), script_url, 0});
    }
    shuffle(rng, trace.nodes);
    capture_.profile = std::move(trace);
    fingerprinting_ = fingerprinting;
  }

  ExpectedCapture finish(Rng& rng, std::string scenario = {}) {
    shuffle(rng, planned_);
    shuffle(rng, capture_.cookies);
    ExpectedCapture expected;
    for (std::size_t i = 0; i < planned_.size(); ++i) {
      capture_.requests.push_back(std::move(planned_[i].request));
      if (planned_[i].event) {
        planned_[i].event->request_index = i;
        expected.leak_events.push_back(std::move(*planned_[i].event));
      }
    }
    std::sort(expected.leak_events.begin(), expected.leak_events.end(), event_order);
    expected.file = capture_file_name(capture_);
    expected.site_etld1 = site();
    expected.consent_action = capture_.consent_action;
    expected.fingerprinting = fingerprinting_;
    expected.third_party_count = third_parties();
    expected.scenario = std::move(scenario);
    return expected;
  }

  inline static const std::vector<std::string> kSentinels = {"getCanvasFp", "getWebglFp",
                                                             "Fingerprint2", "Fingerprint2.get"};
  inline static const std::vector<std::string> kDecoys = {
      "map", "isIE", "getRegularPlugins", "(anonymous)", "render", "dispatchEvent",
      "getCanvasFingerprint", "fingerprint2", "Fingerprint2.getV18", "get"};

 private:
  struct Planned {
    HttpRequest request;
    std::optional<LeakEvent> event;
  };

  inline static const std::vector<std::string> kScriptPaths = {"tag.js", "gpt.js", "loader.js",
                                                               "pixel.js", "sdk.min.js"};
  inline static const std::vector<std::string> kEvents = {"view", "load", "scroll", "click"};

  SiteCapture capture_;
  std::vector<Planned> planned_;
  std::set<std::string> scripts_;
  std::set<std::string> recipients_;
  bool fingerprinting_ = false;
};

Channel random_channel(Rng& rng) { return kAllChannels[below(rng, 3)]; }

void filler_cookies(Rng& rng, ScriptedCapture& b) {
  const std::string& site = b.site();
  const std::string host = "www." + site;
  if (chance(rng, 70)) b.cookie("euconsent-v2", "CP" + hex(rng, 40), host, site);
  if (chance(rng, 60)) b.cookie("lang", pick(rng, std::vector<std::string>{"en-US", "fr_FR", "de", "it-IT"}), host, site);
  if (chance(rng, 60)) b.cookie("_ts", digits(rng, 10), host, site);
  if (chance(rng, 50)) b.cookie("layout", "desktop", host, site);
  if (chance(rng, 50)) b.cookie("ab", "b", host, site);
  if (chance(rng, 40)) b.cookie("last", "https://" + host + "/news", host, site);
  if (chance(rng, 40)) b.cookie("hero", "banner.png", host, site);
}

struct PlantedId {
  std::string name;
  std::string raw;    // cookie value
  std::string value;  // identifier inside it
  std::string domain;
  std::string owner;
  std::array<bool, 3> present{};
};

PlantedId first_party_id(Rng& rng, const std::string& site, const std::string& name) {
  PlantedId p;
  p.name = name;
  p.owner = site;
  p.domain = chance(rng, 50) ? site : "www." + site;
  switch (below(rng, 3)) {
    case 0:
      p.value = uuid(rng);
      p.raw = p.value;
      break;
    case 1:
      p.value = uuid(rng);
      p.raw = "{\"id\":\"" + p.value + "\",\"v\":2}";
      break;
    default:
      p.value = hex(rng, 24);
      p.raw = p.value + ";" + digits(rng, 10);
      break;
  }
  return p;
}

PlantedId third_party_id(Rng& rng, const std::string& owner, const std::string& name) {
  PlantedId p;
  p.name = name;
  p.owner = owner;
  p.domain = owner;
  p.value = chance(rng, 50) ? hex(rng, 32) : uuid(rng) + "-tuct" + hex(rng, 7);
  p.raw = p.value;
  return p;
}

std::vector<std::string> distinct_picks(Rng& rng, const std::vector<std::string>& from,
                                        std::size_t n, const std::set<std::string>& excluded) {
  std::vector<std::string> candidates;
  for (const std::string& d : from) {
    if (!excluded.contains(d)) candidates.push_back(d);
  }
  shuffle(rng, candidates);
  candidates.resize(std::min(n, candidates.size()));
  return candidates;
}

void basic_site(Rng& rng, std::size_t index, const std::vector<std::string>& trackers,
                FixtureCorpus& out) {
  const std::string site = word(rng, 2) + std::to_string(index) + "." + pick(rng, kSiteTlds);
  const std::uint64_t rank = 1 + below(rng, 1'000'000);
  const std::string cmp = pick(rng, kCmps);

  std::vector<std::string> fp_names = {"_uid", "visitor_id", "_pk_id", "CN_xid", "sess_ref"};
  std::vector<std::string> tp_names = {"uid", "tuuid", "IDE", "t_gid", "_ljtrtb", "A3", "ckid"};
  shuffle(rng, fp_names);
  shuffle(rng, tp_names);
  std::vector<PlantedId> ids;
  for (std::uint64_t i = 0, n = below(rng, 3); i < n; ++i) {
    ids.push_back(first_party_id(rng, site, fp_names[i]));
  }
  for (std::uint64_t i = 0, n = below(rng, 4); i < n; ++i) {
    ids.push_back(third_party_id(rng, pick(rng, trackers), tp_names[i]));
  }
  for (PlantedId& p : ids) {
    const std::uint64_t mask = 1 + below(rng, 7);
    for (std::size_t a = 0; a < 3; ++a) p.present[a] = (mask >> a) & 1u;
  }

  for (ConsentAction action : kAllActions) {
    ScriptedCapture b(site, action, index);
    b.capture().rank = rank;
    b.capture().cmp_info = cmp;
    filler_cookies(rng, b);
    b.first_party_traffic(rng);
    for (std::uint64_t i = 0, n = 2 + below(rng, 12); i < n; ++i) {
      b.script(rng, "cdn", pick(rng, trackers));
    }
    for (std::uint64_t i = 0, n = below(rng, 5); i < n; ++i) b.pixel(rng, pick(rng, trackers));
    for (const PlantedId& p : ids) {
      if (!p.present[static_cast<std::size_t>(action)]) continue;
      const CandidateId id = b.cookie(p.name, p.raw, p.domain, p.owner, p.value);
      for (const std::string& r : distinct_picks(rng, trackers, below(rng, 6), {p.owner, site})) {
        b.deliver(rng, id, "sync", r, random_channel(rng));
      }
      if (chance(rng, 20)) b.deliver(rng, id, "ids", p.owner, random_channel(rng));
      if (id.party == Party::kFirst && chance(rng, 20)) {
        b.deliver(rng, id, "www", site, random_channel(rng));
      }
      if (id.party == Party::kThird && chance(rng, 10)) {
        b.deliver(rng, id, "api", site, random_channel(rng));
      }
    }
    b.profile(rng, chance(rng, 30), pick(rng, trackers));
    out.expected.push_back(b.finish(rng));
    out.captures.push_back(std::move(b.capture()));
  }
}

// Script requests to fresh domains until `target` third parties are in use.
void fill_third_parties(Rng& rng, ScriptedCapture& b, std::size_t target,
                        const std::vector<std::string>& pool) {
  for (const std::string& d : pool) {
    if (b.third_parties() >= target) break;
    if (!b.is_third_party(d)) b.script(rng, "cdn", d);
  }
  if (b.third_parties() != target) throw AuditError("fixture domain pool too small");
}

const std::vector<std::string> kGlamourRecipients = {
    "google-analytics.com", "doubleclick.net",  "vogue.com",         "wired.com",
    "facebook.com",         "criteo.com",       "adnxs.com",         "rubiconproject.com",
    "pubmatic.com",         "casalemedia.com",  "amazon-adsystem.com", "scorecardresearch.com",
    "quantserve.com",       "chartbeat.net",    "permutive.com",     "krxd.net",
    "newyorker.com",        "gq.com",           "cntraveler.com",    "bing.com",
    "pinterest.com"};

const std::vector<std::string> kSyncRecipients = {
    "outbrain.com", "adnxs.com",    "criteo.com",    "pubmatic.com",     "rubiconproject.com",
    "openx.net",    "casalemedia.com", "smartadserver.com", "teads.tv",  "adform.net",
    "yahoo.com",    "bidswitch.net", "adsrvr.org",   "3lift.com",        "sharethrough.com",
    "media.net",    "sonobi.com",   "gumgum.com",    "indexww.com",      "yieldmo.com",
    "improvedigital.com"};

std::string sub_for(const std::string& domain) {
  if (domain == "google-analytics.com") return "www";
  if (domain == "doubleclick.net") return "securepubads.g";
  if (domain == "vogue.com" || domain == "wired.com") return "www";
  return "sync";
}

void glamour(Rng& rng, std::size_t index, const std::vector<std::string>& pool, FixtureCorpus& out) {
  const std::string site = "glamour.com";
  for (ConsentAction action : kAllActions) {
    ScriptedCapture b(site, action, index);
    b.capture().rank = 2876;
    b.capture().cmp_info = "OneTrust";
    filler_cookies(rng, b);
    b.first_party_traffic(rng);
    const CandidateId id =
        b.cookie("CN_xid", "73a4ff1f-ff45-4943-bdaa-73658b00bd42", "www.glamour.com", site);
    for (const std::string& r : kGlamourRecipients) b.deliver(rng, id, sub_for(r), r, random_channel(rng));
    b.deliver(rng, id, "www", site, Channel::kUrlParam);
    fill_third_parties(rng, b, 45 + below(rng, 10), pool);
    b.profile(rng, action == ConsentAction::kAcceptAll, pool.front());
    out.expected.push_back(b.finish(rng, "first_party_leak_21"));
    out.captures.push_back(std::move(b.capture()));
  }
}

void camer(Rng& rng, std::size_t index, const std::vector<std::string>& pool, FixtureCorpus& out) {
  const std::string site = "camer.be";
  const std::map<ConsentAction, std::size_t> targets = {
      {ConsentAction::kNoAction, 91}, {ConsentAction::kRejectAll, 131}, {ConsentAction::kAcceptAll, 94}};
  for (ConsentAction action : kAllActions) {
    ScriptedCapture b(site, action, index);
    b.capture().rank = 65402;
    b.capture().cmp_info = "Quantcast";
    filler_cookies(rng, b);
    b.first_party_traffic(rng);
    b.script(rng, "cdn", "taboola.com");
    if (action == ConsentAction::kRejectAll) {
      const CandidateId id = b.cookie("t_gid", "884d05cc-335c-4226-ab94-7ab6114fef6a-tuct65bfbc8",
                                      "taboola.com", "taboola.com");
      for (std::size_t i = 0; i < 20; ++i) {
        b.deliver(rng, id, "sync", kSyncRecipients[i], random_channel(rng));
      }
      b.deliver(rng, id, "trc", "taboola.com", Channel::kUrlParam);
    }
    fill_third_parties(rng, b, targets.at(action), pool);
    b.profile(rng, false, pool.front());
    out.expected.push_back(b.finish(rng, "reject_only_sync_20"));
    out.captures.push_back(std::move(b.capture()));
  }
}

void laprovence(Rng& rng, std::size_t index, const std::vector<std::string>& pool,
                FixtureCorpus& out) {
  const std::string site = "laprovence.com";
  const std::map<ConsentAction, std::size_t> targets = {
      {ConsentAction::kNoAction, 97}, {ConsentAction::kRejectAll, 80}, {ConsentAction::kAcceptAll, 159}};
  for (ConsentAction action : kAllActions) {
    ScriptedCapture b(site, action, index);
    b.capture().rank = 9875;
    b.capture().cmp_info = "Didomi";
    filler_cookies(rng, b);
    b.first_party_traffic(rng);
    fill_third_parties(rng, b, targets.at(action), pool);
    b.profile(rng, action != ConsentAction::kNoAction, pool[1]);
    out.expected.push_back(b.finish(rng, "many_third_parties_159"));
    out.captures.push_back(std::move(b.capture()));
  }
}

void cnnturk(Rng& rng, std::size_t index, const std::vector<std::string>& pool, FixtureCorpus& out) {
  const std::string site = "cnnturk.com";
  for (ConsentAction action : kAllActions) {
    ScriptedCapture b(site, action, index);
    b.capture().rank = 1804;
    b.capture().cmp_info = "Sourcepoint";
    filler_cookies(rng, b);
    b.first_party_traffic(rng);
    b.script(rng, "ap", "lijit.com");
    if (action != ConsentAction::kNoAction) {
      const CandidateId id = b.cookie("_ljtrtb_42", "c98d9202-8774-4e11-8c90-99d9cb879930-tuct65c0de5",
                                      "lijit.com", "lijit.com");
      for (const std::string& r : kSyncRecipients) b.deliver(rng, id, "sync", r, random_channel(rng));
    }
    fill_third_parties(rng, b, 60 + below(rng, 20), pool);
    b.profile(rng, true, pool[2]);
    out.expected.push_back(b.finish(rng, "post_interaction_sync_21"));
    out.captures.push_back(std::move(b.capture()));
  }
}

}  // namespace

FixtureCorpus generate_fixtures(std::uint64_t seed, std::size_t sites, FixtureProfile profile) {
  if (sites == 0) throw AuditError("gen-fixtures: --sites must be at least 1");
  Rng rng(seed);
  FixtureCorpus out;
  out.seed = seed;
  out.profile = profile;

  std::set<std::string> reserved(kGlamourRecipients.begin(), kGlamourRecipients.end());
  reserved.insert(kSyncRecipients.begin(), kSyncRecipients.end());
  for (const char* d : {"glamour.com", "camer.be", "laprovence.com", "cnnturk.com", "taboola.com",
                        "lijit.com"}) {
    reserved.insert(d);
  }
  DomainPool domains(std::move(reserved));
  std::vector<std::string> trackers;
  for (int i = 0; i < 48; ++i) trackers.push_back(domains.fresh(rng));

  std::size_t index = 0;
  if (profile == FixtureProfile::kEdgeCases) {
    std::vector<std::string> pool;
    for (int i = 0; i < 200; ++i) pool.push_back(domains.fresh(rng));
    glamour(rng, index++, pool, out);
    camer(rng, index++, pool, out);
    laprovence(rng, index++, pool, out);
    cnnturk(rng, index++, pool, out);
  }
  while (index < sites) basic_site(rng, index++, trackers, out);
  return out;
}

json manifest_to_json(const FixtureCorpus& corpus) {
  json captures = json::array();
  for (const ExpectedCapture& e : corpus.expected) {
    json events = json::array();
    for (const LeakEvent& ev : e.leak_events) events.push_back(to_json(ev));
    json entry = {{"file", e.file},
                  {"site_etld1", e.site_etld1},
                  {"consent_action", to_string(e.consent_action)},
                  {"fingerprinting", e.fingerprinting},
                  {"third_party_count", e.third_party_count},
                  {"leak_events", std::move(events)}};
    if (!e.scenario.empty()) entry["scenario"] = e.scenario;
    captures.push_back(std::move(entry));
  }
  return {{"seed", corpus.seed},
          {"profile", to_string(corpus.profile)},
          {"sites", corpus.captures.size() / kAllActions.size()},
          {"captures", std::move(captures)}};
}

std::vector<ExpectedCapture> manifest_from_json(const json& doc) {
  std::vector<ExpectedCapture> out;
  for (const json& c : doc.at("captures")) {
    ExpectedCapture e;
    e.file = c.at("file").get<std::string>();
    e.site_etld1 = c.at("site_etld1").get<std::string>();
    const auto action = parse_consent_action(c.at("consent_action").get<std::string>());
    if (!action) throw SchemaError("$.captures[].consent_action", "unknown consent action");
    e.consent_action = *action;
    e.fingerprinting = c.at("fingerprinting").get<bool>();
    e.third_party_count = c.at("third_party_count").get<std::size_t>();
    for (const json& ev : c.at("leak_events")) e.leak_events.push_back(leak_event_from_json(ev));
    if (c.contains("scenario")) e.scenario = c.at("scenario").get<std::string>();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::filesystem::path> write_fixture_corpus(const FixtureCorpus& corpus,
                                                        const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < corpus.captures.size(); ++i) {
    const std::filesystem::path p = dir / corpus.expected[i].file;
    write_file(p, serialize_capture(corpus.captures[i]));
    written.push_back(p);
  }
  const std::filesystem::path manifest = dir / "manifest.json";
  write_file(manifest, manifest_to_json(corpus).dump(1) + "\n");
  written.push_back(manifest);
  return written;
}

// ---------------------------------------------------------------------------
// Unscripted inputs.

namespace {

const std::vector<std::string> kRandomSites = {"alpha.com", "beta.co.uk", "gamma.de",
                                               "delta.com.br", "eps.github.io"};
const std::vector<std::string> kRandomHosts = {
    "www.alpha.com",      "ALPHA.com",         "cdn.beta.co.uk",   "px.tracker.net",
    "sync.tracker.net",   "ads.other.io",      "192.168.1.20",     "localhost",
    "[::1]",              "x.y.gamma.de",      "foo.bar.delta.com.br", "eps.github.io",
    "other.github.io",    "a.b.kawasaki.jp",   "city.kawasaki.jp", "tracker.net."};
const std::vector<std::string> kRandomValues = {
    "abcdef123456", "ZXCVBN987654", "user-00042-xyz", "a1b2c3", "hello world",
    "id+plus/slash1", "en-US", "15693242", "x=y12345", "homepage",
    "c98d9202-8774", "q%zzbad77", "caf\xc3\xa9-uid-01", "MiXeD_case_99", "1693242000123",
    "tok.en.js", "www.alpha.com", "ab&cd=efgh12"};

std::string percent_encode_all(std::string_view s, bool upper) {
  static constexpr char kUpper[] = "0123456789ABCDEF";
  static constexpr char kLower[] = "0123456789abcdef";
  const char* digits = upper ? kUpper : kLower;
  std::string out;
  for (unsigned char c : s) {
    out += '%';
    out += digits[c >> 4];
    out += digits[c & 0xf];
  }
  return out;
}

std::string random_piece(Rng& rng) {
  const std::string& v = pick(rng, kRandomValues);
  switch (below(rng, 6)) {
    case 0:
      return percent_encode_all(v, chance(rng, 50));
    case 1: {
      // Encode a single character.
      if (v.empty()) return v;
      // Whole code points only, so the result stays valid UTF-8.
      std::size_t i = below(rng, v.size());
      while (i > 0 && (static_cast<unsigned char>(v[i]) & 0xc0) == 0x80) --i;
      std::size_t end = i + 1;
      while (end < v.size() && (static_cast<unsigned char>(v[end]) & 0xc0) == 0x80) ++end;
      return v.substr(0, i) + percent_encode_all(v.substr(i, end - i), true) + v.substr(end);
    }
    default:
      return v;
  }
}

std::string random_url(Rng& rng) {
  std::string url = chance(rng, 80) ? "https://" : "http://";
  url += pick(rng, kRandomHosts);
  if (chance(rng, 15)) url += ":8080";
  url += "/";
  for (std::uint64_t i = 0, n = below(rng, 4); i < n; ++i) {
    if (i > 0) url += "/";
    url += random_piece(rng);
  }
  if (chance(rng, 70)) {
    url += "?";
    const std::string delims = "&;|";
    for (std::uint64_t i = 0, n = below(rng, 4); i < n; ++i) {
      if (i > 0) url += delims[below(rng, delims.size())];
      if (chance(rng, 60)) url += word(rng, 1) + "=";
      url += random_piece(rng);
    }
  }
  if (chance(rng, 20)) url += "#" + random_piece(rng);
  return url;
}

std::string random_cookie_value(Rng& rng) {
  switch (below(rng, 4)) {
    case 0: {
      json doc = {{"a", pick(rng, kRandomValues)},
                  {"b", json::array({pick(rng, kRandomValues), 1234567})},
                  {"c", {{"d", pick(rng, kRandomValues)}}}};
      return doc.dump();
    }
    case 1: {
      std::string v;
      const std::string delims = "&;|";
      for (std::uint64_t i = 0, n = 2 + below(rng, 2); i < n; ++i) {
        if (i > 0) v += delims[below(rng, delims.size())];
        v += pick(rng, kRandomValues);
      }
      return v;
    }
    default:
      return pick(rng, kRandomValues);
  }
}

}  // namespace

SiteCapture random_capture(Rng& rng, std::size_t max_requests) {
  SiteCapture c;
  c.site_etld1 = pick(rng, kRandomSites);
  c.site_url = "https://www." + c.site_etld1 + "/";
  c.consent_action = kAllActions[below(rng, 3)];
  c.capture_time = capture_time(below(rng, 1000), c.consent_action);
  for (std::uint64_t i = 0, n = below(rng, 6); i < n; ++i) {
    CookieRecord cookie;
    cookie.name = chance(rng, 10) ? "EUCONSENT" : "c" + std::to_string(i);
    cookie.value = random_cookie_value(rng);
    cookie.domain = normalize_host(chance(rng, 40) ? "www." + c.site_etld1 : pick(rng, kRandomHosts));
    cookie.set_by = etld_plus_one(cookie.domain);
    cookie.party = cookie.set_by == c.site_etld1 ? Party::kFirst : Party::kThird;
    // A jar never repeats (name, domain, path).
    const bool repeated = std::any_of(c.cookies.begin(), c.cookies.end(), [&](const CookieRecord& o) {
      return o.name == cookie.name && o.domain == cookie.domain && o.path == cookie.path;
    });
    if (!repeated) c.cookies.push_back(std::move(cookie));
  }
  for (std::uint64_t i = 0, n = below(rng, max_requests + 1); i < n; ++i) {
    HttpRequest r;
    r.url = random_url(rng);
    if (chance(rng, 30)) {
      r.method = "POST";
      r.body = chance(rng, 50) ? random_cookie_value(rng) : random_piece(rng) + " " + random_piece(rng);
    }
    switch (below(rng, 4)) {
      case 0:
        r.headers.add(chance(rng, 50) ? "Referer" : "referer", random_url(rng));
        break;
      case 1:
        r.headers.add("Referer", "android-app://" + random_piece(rng));
        break;
      default:
        break;
    }
    if (chance(rng, 70)) {
      r.resource_type = chance(rng, 50) ? ResourceType::kScript : ResourceType::kImage;
    }
    c.requests.push_back(std::move(r));
  }
  return c;
}

SiteAudits random_site_audits(Rng& rng, const std::string& site) {
  static const std::vector<std::string> kParties = {
      "t0.com", "t1.net", "t2.io", "t3.com", "t4.net", "t5.io", "t6.com", "t7.net", "t8.io",
      "t9.com", "t10.net", "t11.io", "t12.com", "t13.net", "t14.io", "t15.com", "t16.net",
      "t17.io", "t18.com", "t19.net", "t20.io", "t21.com", "t22.net", "t23.io", "t24.com"};
  static const std::vector<std::string> kCountries = {"fr", "de", "it", "es"};
  SiteAudits out;
  std::optional<std::uint64_t> rank;
  if (chance(rng, 85)) rank = 1 + below(rng, 400'000);
  std::optional<std::string> cc;
  if (chance(rng, 20)) cc = pick(rng, kCountries);
  const std::uint64_t mask = 1 + below(rng, 7);
  for (std::size_t a = 0; a < 3; ++a) {
    if (!((mask >> a) & 1u)) continue;
    SiteAudit audit;
    audit.site_etld1 = site;
    audit.consent_action = kAllActions[a];
    audit.rank = rank;
    audit.cc_tld = cc;
    std::vector<CandidateId> ids;
    for (std::uint64_t i = 0, n = below(rng, 3); i < n; ++i) {
      ids.push_back(CandidateId{"fp" + hex(rng, 10), site, "c" + std::to_string(i), Party::kFirst});
    }
    for (std::uint64_t i = 0, n = below(rng, 3); i < n; ++i) {
      ids.push_back(
          CandidateId{"tp" + hex(rng, 10), pick(rng, kParties), "u" + std::to_string(i), Party::kThird});
    }
    std::set<std::string> recipients;
    for (const CandidateId& id : ids) {
      const std::uint64_t n = chance(rng, 8) ? 18 + below(rng, 7) : below(rng, 6);
      std::vector<std::string> chosen = distinct_picks(rng, kParties, n, {id.owner});
      if (id.party == Party::kThird && chance(rng, 10)) chosen.push_back(site);
      for (const std::string& r : chosen) {
        audit.leak_events.push_back(LeakEvent{id, r, kAllChannels[below(rng, 3)], below(rng, 50)});
        if (r != site) recipients.insert(r);
      }
    }
    std::sort(audit.leak_events.begin(), audit.leak_events.end(), event_order);
    audit.leak_events.erase(std::unique(audit.leak_events.begin(), audit.leak_events.end()),
                            audit.leak_events.end());
    summarize_events(audit);
    audit.third_party_count =
        std::max<std::size_t>(recipients.size(), chance(rng, 5) ? 95 + below(rng, 80) : below(rng, 60));
    if (chance(rng, 30)) {
      audit.fingerprinting.detected = true;
      audit.fingerprinting.matched_functions = {"getCanvasFp"};
      audit.fingerprinting.scripts = {"https://cdn." + pick(rng, kParties) + "/fp.js"};
    }
    out.emplace(audit.consent_action, std::move(audit));
  }
  return out;
}

std::vector<SiteAudits> random_corpus(Rng& rng, std::size_t max_sites) {
  const std::size_t n = 1 + below(rng, std::max<std::size_t>(max_sites, 1));
  std::vector<SiteAudits> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string site = "s" + std::to_string(i) + word(rng, 1) + "." + pick(rng, kSiteTlds);
    out.push_back(random_site_audits(rng, site));
  }
  return out;
}

}  // namespace consent_audit
