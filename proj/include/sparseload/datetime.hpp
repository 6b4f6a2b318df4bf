#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>

#include "sparseload/errors.hpp"

namespace sparseload {

/// Timestamps are UTC-naive local datetimes at one-hour resolution,
/// stored as whole hours since 1970-01-01 00:00.
using HourStamp = std::int64_t;

struct CalendarFields {
  int year;
  int month;    // 1-12
  int day;      // 1-31
  int weekday;  // Monday = 0 ... Sunday = 6
  int hour;     // 0-23
};

namespace detail {

// Days since 1970-01-01 from a proleptic Gregorian date.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

}  // namespace detail

inline HourStamp make_hourstamp(int year, int month, int day, int hour) {
  return detail::days_from_civil(year, month, day) * 24 + hour;
}

/// Calendar fields of a timestamp. Weekday convention is Monday = 0.
inline CalendarFields calendar_features(HourStamp ts) {
  const std::int64_t days = detail::floor_div(ts, 24);
  CalendarFields f{};
  detail::civil_from_days(days, f.year, f.month, f.day);
  // 1970-01-01 was a Thursday (Monday = 0 -> 3).
  f.weekday = static_cast<int>(detail::floor_mod(days + 3, 7));
  f.hour = static_cast<int>(detail::floor_mod(ts, 24));
  return f;
}

/// Parses a datetime with a strftime-like format supporting the tokens
/// %Y %m %d %H %M %S; every other format character must match literally.
/// Fields other than year/month/day/hour must parse to zero (hourly data).
inline HourStamp parse_hourstamp(const std::string& text, const std::string& format) {
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
  std::size_t pos = 0;

  auto read_int = [&](int width_max, int& out) {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
      throw IngestError("expected digit at position " + std::to_string(pos) + " in '" + text + "'");
    }
    int value = 0;
    int count = 0;
    while (pos < text.size() && count < width_max &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      ++pos;
      ++count;
    }
    out = value;
  };

  for (std::size_t i = 0; i < format.size(); ++i) {
    const char c = format[i];
    if (c == '%' && i + 1 < format.size()) {
      const char spec = format[++i];
      switch (spec) {
        case 'Y': read_int(4, year); break;
        case 'm': read_int(2, month); break;
        case 'd': read_int(2, day); break;
        case 'H': read_int(2, hour); break;
        case 'M': read_int(2, minute); break;
        case 'S': read_int(2, second); break;
        case '%':
          if (pos >= text.size() || text[pos] != '%') {
            throw IngestError("literal '%' mismatch in '" + text + "'");
          }
          ++pos;
          break;
        default:
          throw IngestError(std::string("unsupported format token %") + spec);
      }
    } else {
      if (pos >= text.size() || text[pos] != c) {
        throw IngestError("timestamp '" + text + "' does not match format '" + format + "'");
      }
      ++pos;
    }
  }
  if (pos != text.size()) {
    throw IngestError("trailing characters in timestamp '" + text + "'");
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23) {
    throw IngestError("timestamp field out of range in '" + text + "'");
  }
  if (minute != 0 || second != 0) {
    throw IngestError("sub-hourly timestamp '" + text + "' (minutes/seconds must be zero)");
  }
  return make_hourstamp(year, month, day, hour);
}

inline std::string format_hourstamp(HourStamp ts) {
  const CalendarFields f = calendar_features(ts);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:00:00", f.year, f.month, f.day, f.hour);
  return buf;
}

/// Parses "YYYY-MM-DD" into the hourstamp of that day's midnight.
inline HourStamp parse_date(const std::string& text) {
  return parse_hourstamp(text + " 00:00:00", "%Y-%m-%d %H:%M:%S");
}

}  // namespace sparseload
