#include "portcap/domain.hpp"

#include <cmath>
#include <cstdio>

namespace portcap {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
// Howard Hinnant's days_from_civil algorithm.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

}  // namespace

Duration::Duration(double v, TimeUnit u) : value(v), unit(u) {
  if (!std::isfinite(v) || v < 0.0)
    throw InputError("duration must be a finite nonnegative value");
}

double to_hours(const Duration& d) {
  return d.unit == TimeUnit::Days ? d.value * 24.0 : d.value;
}

Rate::Rate(double per_hour) : per_hour_(per_hour) {
  if (!std::isfinite(per_hour) || per_hour < 0.0)
    throw InputError("rate must be a finite nonnegative value");
}

double traffic_intensity(Rate total_arrival, Rate service) {
  if (service.per_hour() == 0.0) throw ModelError("zero service rate");
  return total_arrival.per_hour() / service.per_hour();
}

CargoClass::CargoClass(std::string n, std::string unit)
    : name(std::move(n)), unit_label(std::move(unit)) {
  if (name.empty()) throw InputError("cargo class name must be non-empty");
}

Timestamp parse_iso8601_utc(const std::string& text) {
  int y = 0;
  unsigned mo = 0, da = 0, h = 0, mi = 0, s = 0;
  char tail[8] = {0};
  // Fractional seconds are matched by the trailing %7s and validated below.
  int n = std::sscanf(text.c_str(), "%d-%2u-%2uT%2u:%2u:%2u%7s", &y, &mo, &da,
                      &h, &mi, &s, tail);
  if (n != 7) throw InputError("bad timestamp '" + text + "'");
  std::string rest(tail);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) throw InputError("bad timestamp '" + text + "'");
    rest = rest.substr(i);
  }
  if (rest != "Z") throw InputError("bad timestamp '" + text + "' (must be UTC 'Z')");
  if (mo < 1 || mo > 12 || da < 1 || da > days_in_month(y, mo) || h > 23 ||
      mi > 59 || s > 60)
    throw InputError("bad timestamp '" + text + "'");
  std::int64_t secs =
      days_from_civil(y, mo, da) * 86400 + h * 3600 + mi * 60 + s;
  return Timestamp(std::chrono::seconds(secs));
}

std::string format_iso8601_utc(Timestamp t) {
  std::int64_t secs = t.time_since_epoch().count();
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y;
  unsigned mo, da;
  civil_from_days(days, y, mo, da);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y,
                mo, da, static_cast<long long>(rem / 3600),
                static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

Window::Window(std::string label, Timestamp start, Timestamp end)
    : label_(std::move(label)), start_(start), end_(end) {
  if (label_.empty()) throw InputError("window label must be non-empty");
  if (end_ <= start_)
    throw InputError("window '" + label_ + "': end must be after start");
  duration_hours_ =
      std::chrono::duration<double, std::ratio<3600>>(end_ - start_).count();
}

Window Window::from_quarter(const std::string& label) {
  int y = 0, q = 0;
  char sep = 0;
  if (std::sscanf(label.c_str(), "%4d-%c%1d", &y, &sep, &q) != 3 ||
      (sep != 'Q' && sep != 'q') || q < 1 || q > 4)
    throw InputError("bad quarter label '" + label + "' (expected YYYY-Qn)");
  unsigned start_month = static_cast<unsigned>(3 * (q - 1) + 1);
  int end_year = q == 4 ? y + 1 : y;
  unsigned end_month = q == 4 ? 1 : start_month + 3;
  Timestamp start(std::chrono::seconds(days_from_civil(y, start_month, 1) * 86400));
  Timestamp end(std::chrono::seconds(days_from_civil(end_year, end_month, 1) * 86400));
  return Window(label, start, end);
}

Window Window::from_hours(std::string label, double hours) {
  if (!std::isfinite(hours) || hours <= 0.0)
    throw InputError("window duration must be positive");
  Timestamp start(std::chrono::seconds(0));
  Timestamp end(std::chrono::seconds(static_cast<std::int64_t>(hours * 3600.0)));
  return Window(std::move(label), start, end);
}

}  // namespace portcap
