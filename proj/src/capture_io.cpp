#include "consent_audit/capture_io.hpp"

#include <map>
#include <tuple>

#include "consent_audit/public_suffix.hpp"
#include "consent_audit/strings.hpp"
#include "consent_audit/url.hpp"
#include "json.hpp"

namespace consent_audit {

using nlohmann::json;

namespace {

// Typed field access that reports the JSON path of the failing node.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& raw() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

  bool has(const char* key) const {
    return value_.is_object() && value_.contains(key) && !value_.at(key).is_null();
  }

  Node at(const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    if (!value_.contains(key)) throw SchemaError(child_path(key), "missing required field");
    return Node(value_.at(key), child_path(key));
  }

  std::optional<Node> opt(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node(value_.at(key), child_path(key));
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  std::uint64_t uint() const {
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    if (value_.is_number_integer() && value_.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(value_.get<std::int64_t>());
    }
    fail("expected a nonnegative integer");
  }

  std::vector<Node> array() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    out.reserve(value_.size());
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

 private:
  std::string child_path(const char* key) const { return path_ + "." + key; }

  const json& value_;
  std::string path_;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

HeaderMap read_headers(const Node& node) {
  HeaderMap headers;
  if (node.raw().is_object()) {
    for (const auto& [k, v] : node.raw().items()) {
      if (!v.is_string()) throw SchemaError(node.path() + "." + k, "expected a string");
      headers.add(k, v.get<std::string>());
    }
    return headers;
  }
  for (const Node& entry : node.array()) {
    headers.add(entry.at("name").str(), entry.at("value").str());
  }
  return headers;
}

HttpRequest read_request(const Node& node) {
  HttpRequest req;
  if (auto m = node.opt("method")) req.method = m->str();
  const Node url = node.at("url");
  req.url = url.str();
  if (!try_parse_url(req.url)) url.fail("not an absolute URL");
  if (auto h = node.opt("headers")) req.headers = read_headers(*h);
  if (auto b = node.opt("body")) req.body = b->str();
  if (auto t = node.opt("resource_type")) {
    req.resource_type = parse_resource_type(t->str());
    if (!req.resource_type) t->fail("unknown resource_type \"" + t->str() + "\"");
  }
  return req;
}

ProfileTrace read_profile(const Node& node) {
  ProfileTrace trace;
  if (auto si = node.opt("sampling_interval_us")) {
    const auto v = si->uint();
    if (v == 0 || v > 0xffffffffULL) si->fail("sampling_interval_us must be positive");
    trace.sampling_interval_us = static_cast<std::uint32_t>(v);
  }
  for (const Node& n : node.at("nodes").array()) {
    ProfileNode pn;
    pn.function_name = n.at("function_name").str();
    if (auto u = n.opt("script_url")) pn.script_url = u->str();
    if (auto h = n.opt("hit_count")) pn.hit_count = h->uint();
    trace.nodes.push_back(std::move(pn));
  }
  return trace;
}

}  // namespace

SiteCapture parse_capture(std::string_view json_text, std::vector<std::string>* warnings) {
  const json doc = parse_json(json_text);
  const Node root(doc, "$");
  if (!doc.is_object()) root.fail("expected an object");

  const Node version = root.at("version");
  if (!version.raw().is_number_integer()) version.fail("expected an integer");
  if (version.raw().get<std::int64_t>() != kCaptureSchemaVersion) {
    throw VersionError("unsupported capture schema version " + version.raw().dump() +
                       " (expected " + std::to_string(kCaptureSchemaVersion) + ")");
  }

  SiteCapture cap;
  const Node site_url = root.at("site_url");
  cap.site_url = site_url.str();
  const auto parsed = try_parse_url(cap.site_url);
  if (!parsed) site_url.fail("not an absolute URL");
  const std::string expected_etld1 = etld_plus_one(parsed->host);
  if (auto e = root.opt("site_etld1")) {
    cap.site_etld1 = e->str();
    if (cap.site_etld1 != expected_etld1) {
      e->fail("does not match registrable domain of site_url (\"" + expected_etld1 + "\")");
    }
  } else {
    cap.site_etld1 = expected_etld1;
  }

  if (auto r = root.opt("rank")) {
    cap.rank = r->uint();
    if (*cap.rank == 0) r->fail("rank must be positive");
  }
  if (auto c = root.opt("cc_tld")) {
    cap.cc_tld = c->str();
    if (*cap.cc_tld != to_lower(*cap.cc_tld) || cap.cc_tld->empty()) {
      c->fail("cc_tld must be a nonempty lowercase label");
    }
  }

  const Node action = root.at("consent_action");
  const auto parsed_action = parse_consent_action(action.str());
  if (!parsed_action) action.fail("unknown consent_action \"" + action.str() + "\"");
  cap.consent_action = *parsed_action;

  if (auto c = root.opt("cmp_info")) cap.cmp_info = c->str();
  if (auto h = root.opt("html")) cap.html = h->str();
  if (auto t = root.opt("capture_time")) {
    const auto ts = parse_timestamp(t->str());
    if (!ts) t->fail("expected an ISO-8601 UTC timestamp");
    cap.capture_time = *ts;
  }

  for (const Node& r : root.at("requests").array()) cap.requests.push_back(read_request(r));

  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  for (const Node& c : root.at("cookies").array()) {
    CookieRecord rec;
    rec.name = c.at("name").str();
    rec.value = c.at("value").str();
    const Node domain = c.at("domain");
    rec.domain = normalize_host(domain.str());
    if (rec.domain.empty()) domain.fail("empty cookie domain");
    if (auto p = c.opt("path")) rec.path = p->str();
    if (auto s = c.opt("set_by")) {
      rec.set_by = normalize_host(s->str());
      if (rec.set_by.empty()) s->fail("empty set_by");
    } else {
      rec.set_by = etld_plus_one(rec.domain);
    }
    rec.party = rec.set_by == cap.site_etld1 ? Party::kFirst : Party::kThird;
    if (auto p = c.opt("party")) {
      const auto declared = parse_party(p->str());
      if (!declared) p->fail("unknown party \"" + p->str() + "\"");
      if (*declared != rec.party) {
        p->fail("party disagrees with set_by \"" + rec.set_by + "\" on site \"" +
                cap.site_etld1 + "\"");
      }
    }
    auto key = std::make_tuple(rec.name, rec.domain, rec.path);
    if (auto it = seen.find(key); it != seen.end()) {
      if (warnings) {
        warnings->push_back(c.path() + ": duplicate cookie " + rec.name + " (" + rec.domain +
                            rec.path + "); last record wins");
      }
      cap.cookies[it->second] = std::move(rec);
    } else {
      seen.emplace(std::move(key), cap.cookies.size());
      cap.cookies.push_back(std::move(rec));
    }
  }

  if (auto p = root.opt("profile")) cap.profile = read_profile(*p);
  validate_capture(cap);
  return cap;
}

void validate_capture(const SiteCapture& cap) {
  const auto url = try_parse_url(cap.site_url);
  if (!url) throw SchemaError("$.site_url", "not an absolute URL");
  if (cap.site_etld1 != etld_plus_one(url->host)) {
    throw SchemaError("$.site_etld1", "does not match registrable domain of site_url");
  }
  if (cap.rank && *cap.rank == 0) throw SchemaError("$.rank", "rank must be positive");
  for (std::size_t i = 0; i < cap.requests.size(); ++i) {
    if (!try_parse_url(cap.requests[i].url)) {
      throw SchemaError("$.requests[" + std::to_string(i) + "].url", "not an absolute URL");
    }
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  for (std::size_t i = 0; i < cap.cookies.size(); ++i) {
    const CookieRecord& c = cap.cookies[i];
    const std::string path = "$.cookies[" + std::to_string(i) + "]";
    if (c.domain.empty() || c.domain.front() == '.') {
      throw SchemaError(path + ".domain", "domain must be nonempty without a leading dot");
    }
    const Party expected = c.set_by == cap.site_etld1 ? Party::kFirst : Party::kThird;
    if (c.party != expected) throw SchemaError(path + ".party", "party disagrees with set_by");
    if (!seen.emplace(std::make_tuple(c.name, c.domain, c.path), i).second) {
      throw SchemaError(path, "duplicate cookie (name, domain, path)");
    }
  }
  if (cap.profile && cap.profile->sampling_interval_us == 0) {
    throw SchemaError("$.profile.sampling_interval_us", "must be positive");
  }
}

std::string serialize_capture(const SiteCapture& cap) {
  // ordered_json keeps the documented field order in the output.
  nlohmann::ordered_json doc;
  doc["version"] = kCaptureSchemaVersion;
  doc["site_url"] = cap.site_url;
  doc["site_etld1"] = cap.site_etld1;
  if (cap.rank) doc["rank"] = *cap.rank;
  if (cap.cc_tld) doc["cc_tld"] = *cap.cc_tld;
  doc["consent_action"] = to_string(cap.consent_action);
  if (cap.cmp_info) doc["cmp_info"] = *cap.cmp_info;
  doc["capture_time"] = format_timestamp(cap.capture_time);
  auto requests = nlohmann::ordered_json::array();
  for (const HttpRequest& r : cap.requests) {
    nlohmann::ordered_json jr;
    jr["method"] = r.method;
    jr["url"] = r.url;
    auto headers = nlohmann::ordered_json::array();
    for (const auto& [k, v] : r.headers.entries()) {
      headers.push_back({{"name", k}, {"value", v}});
    }
    jr["headers"] = std::move(headers);
    if (r.body) jr["body"] = *r.body;
    if (r.resource_type) jr["resource_type"] = to_string(*r.resource_type);
    requests.push_back(std::move(jr));
  }
  doc["requests"] = std::move(requests);
  auto cookies = nlohmann::ordered_json::array();
  for (const CookieRecord& c : cap.cookies) {
    cookies.push_back({{"name", c.name},
                       {"value", c.value},
                       {"domain", c.domain},
                       {"path", c.path},
                       {"set_by", c.set_by},
                       {"party", to_string(c.party)}});
  }
  doc["cookies"] = std::move(cookies);
  if (cap.profile) {
    auto nodes = nlohmann::ordered_json::array();
    for (const ProfileNode& n : cap.profile->nodes) {
      nodes.push_back({{"function_name", n.function_name},
                       {"script_url", n.script_url},
                       {"hit_count", n.hit_count}});
    }
    doc["profile"] = {{"sampling_interval_us", cap.profile->sampling_interval_us},
                      {"nodes", std::move(nodes)}};
  }
  if (cap.html) doc["html"] = *cap.html;
  return doc.dump(1) + "\n";
}

HarMeta parse_har_meta(std::string_view json_text) {
  const json doc = parse_json(json_text);
  const Node root(doc, "$");
  HarMeta meta;
  meta.site_url = root.at("site_url").str();
  const Node action = root.at("consent_action");
  const auto a = parse_consent_action(action.str());
  if (!a) action.fail("unknown consent_action \"" + action.str() + "\"");
  meta.consent_action = *a;
  if (auto r = root.opt("rank")) {
    meta.rank = r->uint();
    if (*meta.rank == 0) r->fail("rank must be positive");
  }
  if (auto c = root.opt("cc_tld")) meta.cc_tld = c->str();
  if (auto c = root.opt("cmp_info")) meta.cmp_info = c->str();
  return meta;
}

namespace {

std::optional<ResourceType> har_resource_type(std::string_view t) {
  const std::string lower = to_lower(t);
  if (lower == "script") return ResourceType::kScript;
  if (lower == "xhr" || lower == "fetch") return ResourceType::kXhr;
  if (lower == "document") return ResourceType::kDocument;
  if (lower == "image") return ResourceType::kImage;
  if (lower.empty()) return std::nullopt;
  return ResourceType::kOther;
}

// "name=value; Domain=.x.com; Path=/" -> cookie fields.
std::optional<CookieRecord> parse_set_cookie(std::string_view header, const std::string& host) {
  auto parts = split_any(header, ";");
  const std::string_view pair = trim(parts.front());
  const auto eq = pair.find('=');
  if (eq == std::string_view::npos || eq == 0) return std::nullopt;
  CookieRecord rec;
  rec.name = std::string(trim(pair.substr(0, eq)));
  rec.value = std::string(trim(pair.substr(eq + 1)));
  if (rec.value.size() >= 2 && rec.value.front() == '"' && rec.value.back() == '"') {
    rec.value = rec.value.substr(1, rec.value.size() - 2);
  }
  rec.domain = host;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view attr = trim(parts[i]);
    const auto aeq = attr.find('=');
    const std::string_view key = trim(attr.substr(0, aeq));
    const std::string_view val = aeq == std::string_view::npos ? "" : trim(attr.substr(aeq + 1));
    if (iequals(key, "domain") && !val.empty()) {
      rec.domain = normalize_host(val);
    } else if (iequals(key, "path") && !val.empty()) {
      rec.path = std::string(val);
    }
  }
  return rec;
}

}  // namespace

SiteCapture import_har(std::string_view har_text, const HarMeta& meta,
                       std::vector<std::string>* warnings) {
  const json doc = parse_json(har_text);
  const Node root(doc, "$");
  const Node log = root.at("log");
  const auto entries = log.at("entries").array();

  SiteCapture cap;
  cap.site_url = meta.site_url;
  const auto site = try_parse_url(meta.site_url);
  if (!site) throw SchemaError("meta.site_url", "not an absolute URL");
  cap.site_etld1 = etld_plus_one(site->host);
  cap.rank = meta.rank;
  cap.cc_tld = meta.cc_tld;
  cap.consent_action = meta.consent_action;
  cap.cmp_info = meta.cmp_info;

  std::optional<Timestamp> first_time;
  if (auto pages = log.opt("pages")) {
    for (const Node& p : pages->array()) {
      if (auto t = p.opt("startedDateTime")) {
        first_time = parse_timestamp(t->str());
        if (first_time) break;
      }
    }
  }

  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  for (const Node& entry : entries) {
    const Node request = entry.at("request");
    HttpRequest req;
    req.method = request.at("method").str();
    const Node url = request.at("url");
    req.url = url.str();
    const auto parsed = try_parse_url(req.url);
    if (!parsed) url.fail("not an absolute URL");
    if (auto h = request.opt("headers")) req.headers = read_headers(*h);
    if (auto pd = request.opt("postData")) {
      if (auto text = pd->opt("text")) req.body = text->str();
    }
    if (auto rt = entry.opt("_resourceType")) req.resource_type = har_resource_type(rt->str());
    if (!first_time) {
      if (auto t = entry.opt("startedDateTime")) first_time = parse_timestamp(t->str());
    }

    if (auto response = entry.opt("response")) {
      if (auto headers = response->opt("headers")) {
        const HeaderMap resp_headers = read_headers(*headers);
        for (std::string_view value : resp_headers.find_all("set-cookie")) {
          // Chrome folds repeated Set-Cookie headers into one value joined by '\n'.
          for (std::string_view line : split_any(value, "\n")) {
            if (trim(line).empty()) continue;
            auto rec = parse_set_cookie(line, parsed->host);
            if (!rec) continue;
            rec->set_by = etld_plus_one(parsed->host);
            rec->party = rec->set_by == cap.site_etld1 ? Party::kFirst : Party::kThird;
            auto key = std::make_tuple(rec->name, rec->domain, rec->path);
            if (auto it = seen.find(key); it != seen.end()) {
              if (warnings) {
                warnings->push_back(entry.path() + ": cookie " + rec->name +
                                    " set again; last record wins");
              }
              cap.cookies[it->second] = std::move(*rec);
            } else {
              seen.emplace(std::move(key), cap.cookies.size());
              cap.cookies.push_back(std::move(*rec));
            }
          }
        }
      }
    }
    cap.requests.push_back(std::move(req));
  }
  if (first_time) cap.capture_time = *first_time;
  validate_capture(cap);
  return cap;
}

std::string capture_file_name(const SiteCapture& capture) {
  return capture.site_etld1 + "." + std::string(file_tag(capture.consent_action)) +
         ".capture.json";
}

}  // namespace consent_audit
