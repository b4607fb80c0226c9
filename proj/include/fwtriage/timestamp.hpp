#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace fwtriage {

using Timestamp = std::chrono::sys_seconds;

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DD". Throws std::invalid_argument.
Timestamp parse_iso8601(std::string_view text);

/// "YYYY-MM-DD"
std::string format_date(Timestamp t);

Timestamp now_utc();

}  // namespace fwtriage
