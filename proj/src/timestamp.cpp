#include "fwtriage/timestamp.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace fwtriage {

namespace {

using namespace std::chrono;

Timestamp from_fields(int y, unsigned mo, unsigned d, int h, int mi, int s) {
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    throw std::invalid_argument("timestamp out of range");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace

std::string format_iso8601(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_date(Timestamp t) { return format_iso8601(t).substr(0, 10); }

Timestamp parse_iso8601(std::string_view text) {
  const std::string s(text);
  int y = 0, h = 0, mi = 0, sec = 0;
  unsigned mo = 0, d = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d:%2dZ%n", &y, &mo, &d, &h, &mi, &sec,
                  &consumed) == 6 &&
      consumed == static_cast<int>(s.size())) {
    return from_fields(y, mo, d, h, mi, sec);
  }
  consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &mo, &d, &consumed) == 3 &&
      consumed == static_cast<int>(s.size())) {
    return from_fields(y, mo, d, 0, 0, 0);
  }
  throw std::invalid_argument("not an ISO-8601 UTC timestamp: '" + s + "'");
}

Timestamp now_utc() { return floor<seconds>(system_clock::now()); }

}  // namespace fwtriage
