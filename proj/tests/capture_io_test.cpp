#include "consent_audit/capture_io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "consent_audit/fixtures.hpp"
#include "json.hpp"

namespace consent_audit {
namespace {

using nlohmann::json;

json minimal_capture() {
  return json{{"version", 1},
              {"site_url", "https://www.example.fr/"},
              {"consent_action", "RejectAll"},
              {"capture_time", "2023-03-01T10:00:00Z"},
              {"requests",
               json::array({{{"method", "GET"},
                             {"url", "https://px.tracker.com/p?uid=abc123456"},
                             {"headers", json::array({{{"name", "Referer"},
                                                       {"value", "https://www.example.fr/"}}})},
                             {"resource_type", "Image"}}})},
              {"cookies", json::array({{{"name", "_uid"},
                                        {"value", "abc123456"},
                                        {"domain", ".example.fr"}}})}};
}

std::string message_of(const json& doc) {
  try {
    parse_capture(doc.dump());
  } catch (const AuditError& e) {
    return e.what();
  }
  return "";
}

TEST(CaptureIoTest, ParsesMinimalDocument) {
  std::vector<std::string> warnings;
  const SiteCapture c = parse_capture(minimal_capture().dump(), &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(c.site_etld1, "example.fr");
  EXPECT_EQ(c.consent_action, ConsentAction::kRejectAll);
  ASSERT_EQ(c.requests.size(), 1u);
  EXPECT_EQ(c.requests[0].headers.find("referer"), "https://www.example.fr/");
  EXPECT_EQ(c.requests[0].resource_type, ResourceType::kImage);
  ASSERT_EQ(c.cookies.size(), 1u);
  EXPECT_EQ(c.cookies[0].domain, "example.fr");
  EXPECT_EQ(c.cookies[0].path, "/");
  EXPECT_EQ(c.cookies[0].set_by, "example.fr");
  EXPECT_EQ(c.cookies[0].party, Party::kFirst);
  EXPECT_EQ(format_timestamp(c.capture_time), "2023-03-01T10:00:00Z");
}

TEST(CaptureIoTest, HeadersAsObject) {
  json doc = minimal_capture();
  doc["requests"][0]["headers"] = {{"Referer", "https://r.example/"}};
  const SiteCapture c = parse_capture(doc.dump());
  EXPECT_EQ(c.requests[0].headers.find("REFERER"), "https://r.example/");
}

TEST(CaptureIoTest, BadConsentActionNamesTheField) {
  json doc = minimal_capture();
  doc["consent_action"] = "Maybe";
  try {
    parse_capture(doc.dump());
    FAIL() << "accepted a bad consent_action";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.consent_action");
    EXPECT_NE(std::string(e.what()).find("consent_action"), std::string::npos);
  }
}

TEST(CaptureIoTest, VersionChecks) {
  json doc = minimal_capture();
  doc.erase("version");
  EXPECT_THROW(parse_capture(doc.dump()), SchemaError);
  doc["version"] = 2;
  EXPECT_THROW(parse_capture(doc.dump()), VersionError);
}

TEST(CaptureIoTest, SchemaViolationsCarryPaths) {
  json doc = minimal_capture();
  doc["requests"][0]["url"] = "/relative";
  EXPECT_NE(message_of(doc).find("$.requests[0].url"), std::string::npos);

  doc = minimal_capture();
  doc["site_etld1"] = "other.fr";
  EXPECT_NE(message_of(doc).find("$.site_etld1"), std::string::npos);

  doc = minimal_capture();
  doc["rank"] = 0;
  EXPECT_NE(message_of(doc).find("$.rank"), std::string::npos);

  doc = minimal_capture();
  doc["cookies"][0]["party"] = "third";
  EXPECT_NE(message_of(doc).find("$.cookies[0].party"), std::string::npos);

  doc = minimal_capture();
  doc["cookies"][0].erase("value");
  EXPECT_NE(message_of(doc).find("$.cookies[0].value"), std::string::npos);

  EXPECT_THROW(parse_capture("{not json"), SchemaError);
}

TEST(CaptureIoTest, UnknownFieldsIgnored) {
  json doc = minimal_capture();
  doc["dwell_seconds"] = 10;
  doc["requests"][0]["timing"] = 12.5;
  EXPECT_NO_THROW(parse_capture(doc.dump()));
}

TEST(CaptureIoTest, DuplicateCookieLastWins) {
  json doc = minimal_capture();
  doc["cookies"].push_back({{"name", "_uid"}, {"value", "second-value"}, {"domain", "example.fr"}});
  std::vector<std::string> warnings;
  const SiteCapture c = parse_capture(doc.dump(), &warnings);
  ASSERT_EQ(c.cookies.size(), 1u);
  EXPECT_EQ(c.cookies[0].value, "second-value");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(CaptureIoTest, ThirdPartyCookie) {
  json doc = minimal_capture();
  doc["cookies"].push_back({{"name", "t_gid"}, {"value", "zzz999999"}, {"domain", "taboola.com"}});
  const SiteCapture c = parse_capture(doc.dump());
  EXPECT_EQ(c.cookies[1].set_by, "taboola.com");
  EXPECT_EQ(c.cookies[1].party, Party::kThird);
}

TEST(CaptureIoTest, RoundTripIsIdentity) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    SiteCapture c = random_capture(rng, 20);
    if (i % 3 == 0) c.rank = 1 + rng() % 1000;
    if (i % 4 == 0) c.cc_tld = "fr";
    if (i % 5 == 0) c.html = "<html></html>";
    const std::string text = serialize_capture(c);
    const SiteCapture back = parse_capture(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_capture(back), text);
  }
}

TEST(CaptureIoTest, FixturesRoundTrip) {
  const FixtureCorpus corpus = generate_fixtures(5, 4, FixtureProfile::kEdgeCases);
  for (const SiteCapture& c : corpus.captures) {
    EXPECT_EQ(parse_capture(serialize_capture(c)), c);
  }
}

TEST(CaptureIoTest, ImportHar) {
  const json har = {
      {"log",
       {{"version", "1.2"},
        {"pages", json::array({{{"startedDateTime", "2023-05-01T08:00:00.123Z"}}})},
        {"entries",
         json::array(
             {{{"startedDateTime", "2023-05-01T08:00:01.000Z"},
               {"_resourceType", "script"},
               {"request",
                {{"method", "GET"},
                 {"url", "https://cdn.tracker.com/t.js"},
                 {"headers", json::array({{{"name", "Referer"}, {"value", "https://www.news.de/"}}})}}},
               {"response",
                {{"headers",
                  json::array({{{"name", "Set-Cookie"},
                                {"value", "uid=0a1b2c3d4e5f; Domain=.tracker.com; Path=/\n"
                                          "seg=sport; Path=/x"}}})}}}},
              {{"_resourceType", "fetch"},
               {"request",
                {{"method", "POST"},
                 {"url", "https://sync.other.io/c"},
                 {"postData", {{"mimeType", "text/plain"}, {"text", "uid=0a1b2c3d4e5f"}}}}}}})}}}};
  HarMeta meta;
  meta.site_url = "https://www.news.de/";
  meta.consent_action = ConsentAction::kAcceptAll;
  const SiteCapture c = import_har(har.dump(), meta);
  EXPECT_EQ(c.site_etld1, "news.de");
  EXPECT_EQ(format_timestamp(c.capture_time), "2023-05-01T08:00:00Z");
  ASSERT_EQ(c.requests.size(), 2u);
  EXPECT_EQ(c.requests[0].resource_type, ResourceType::kScript);
  EXPECT_EQ(c.requests[1].resource_type, ResourceType::kXhr);
  EXPECT_EQ(c.requests[1].body, "uid=0a1b2c3d4e5f");
  ASSERT_EQ(c.cookies.size(), 2u);
  EXPECT_EQ(c.cookies[0].domain, "tracker.com");
  EXPECT_EQ(c.cookies[0].set_by, "tracker.com");
  EXPECT_EQ(c.cookies[0].party, Party::kThird);
  EXPECT_EQ(c.cookies[1].domain, "cdn.tracker.com");
  EXPECT_EQ(c.cookies[1].path, "/x");
}

TEST(CaptureIoTest, HarMetaRequiresAction) {
  EXPECT_THROW(parse_har_meta(R"({"site_url": "https://a.com/"})"), SchemaError);
  const HarMeta m = parse_har_meta(R"({"site_url": "https://a.com/", "consent_action": "NoAction",
                                      "rank": 12})");
  EXPECT_EQ(m.rank, 12u);
}

TEST(CaptureIoTest, FileName) {
  SiteCapture c;
  c.site_etld1 = "glamour.com";
  c.consent_action = ConsentAction::kAcceptAll;
  EXPECT_EQ(capture_file_name(c), "glamour.com.acceptall.capture.json");
}

TEST(CaptureIoTest, TimestampRoundTrip) {
  for (const char* t : {"1970-01-01T00:00:00Z", "2023-03-01T23:59:59Z", "2000-02-29T12:00:00Z"}) {
    const auto ts = parse_timestamp(t);
    ASSERT_TRUE(ts) << t;
    EXPECT_EQ(format_timestamp(*ts), t);
  }
  EXPECT_EQ(format_timestamp(*parse_timestamp("2023-03-01T10:00:00.999+00:00")),
            "2023-03-01T10:00:00Z");
  EXPECT_FALSE(parse_timestamp("2023-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_timestamp("yesterday"));
}

}  // namespace
}  // namespace consent_audit
