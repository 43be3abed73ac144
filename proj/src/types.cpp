#include "consent_audit/types.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "consent_audit/strings.hpp"

namespace consent_audit {

std::string_view to_string(ConsentAction action) {
  switch (action) {
    case ConsentAction::kNoAction:
      return "NoAction";
    case ConsentAction::kRejectAll:
      return "RejectAll";
    case ConsentAction::kAcceptAll:
      return "AcceptAll";
  }
  return "NoAction";
}

std::optional<ConsentAction> parse_consent_action(std::string_view text) {
  for (ConsentAction a : kAllActions) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

std::string_view file_tag(ConsentAction action) {
  switch (action) {
    case ConsentAction::kNoAction:
      return "noaction";
    case ConsentAction::kRejectAll:
      return "rejectall";
    case ConsentAction::kAcceptAll:
      return "acceptall";
  }
  return "noaction";
}

std::string_view to_string(Party party) {
  return party == Party::kFirst ? "First" : "Third";
}

std::optional<Party> parse_party(std::string_view text) {
  if (text == "First") return Party::kFirst;
  if (text == "Third") return Party::kThird;
  return std::nullopt;
}

std::string_view to_string(ResourceType type) {
  switch (type) {
    case ResourceType::kScript:
      return "Script";
    case ResourceType::kXhr:
      return "Xhr";
    case ResourceType::kDocument:
      return "Document";
    case ResourceType::kImage:
      return "Image";
    case ResourceType::kOther:
      return "Other";
  }
  return "Other";
}

std::optional<ResourceType> parse_resource_type(std::string_view text) {
  for (ResourceType t : {ResourceType::kScript, ResourceType::kXhr, ResourceType::kDocument,
                         ResourceType::kImage, ResourceType::kOther}) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

void HeaderMap::add(std::string name, std::string value) {
  entries_.emplace_back(std::move(name), std::move(value));
}

std::optional<std::string_view> HeaderMap::find(std::string_view name) const {
  for (const auto& [k, v] : entries_) {
    if (iequals(k, name)) return std::string_view(v);
  }
  return std::nullopt;
}

std::vector<std::string_view> HeaderMap::find_all(std::string_view name) const {
  std::vector<std::string_view> out;
  for (const auto& [k, v] : entries_) {
    if (iequals(k, name)) out.emplace_back(v);
  }
  return out;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h, mi, sec;
  if (!read_int(s, 0, 4, y) || s.size() < 19 || s[4] != '-' || !read_int(s, 5, 2, mo) ||
      s[7] != '-' || !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
      !read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi) || s[16] != ':' ||
      !read_int(s, 17, 2, sec)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return std::nullopt;
  }
  const std::string_view zone = s.substr(pos);
  if (zone != "Z" && zone != "+00:00" && zone != "z") return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

}  // namespace consent_audit
