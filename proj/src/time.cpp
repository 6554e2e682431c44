#include "winterrisk/time.hpp"

#include "winterrisk/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace winterrisk {

using namespace std::chrono;

namespace {

constexpr std::int64_t kHoursPerDay = 24;

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int read_int(std::string_view text, std::size_t& pos, std::size_t digits, std::string_view whole)
{
    if (pos + digits > text.size())
        throw InputError(fmt::format("truncated timestamp '{}'", whole));
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + digits, value);
    if (ec != std::errc{} || ptr != text.data() + pos + digits)
        throw InputError(fmt::format("malformed timestamp '{}'", whole));
    pos += digits;
    return value;
}

void expect(std::string_view text, std::size_t& pos, char c, std::string_view whole)
{
    if (pos >= text.size() || text[pos] != c)
        throw InputError(fmt::format("malformed timestamp '{}'", whole));
    ++pos;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

HourStamp to_stamp(const CivilHour& c)
{
    year_month_day ymd{year{c.year}, month{c.month}, day{c.day}};
    if (!ymd.ok() || c.hour > 23)
        throw InputError(fmt::format("invalid civil time {:04d}-{:02d}-{:02d} {:02d}h", c.year, c.month, c.day, c.hour));
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return HourStamp{static_cast<std::int64_t>(days) * kHoursPerDay + c.hour};
}

sys_days to_date(HourStamp s)
{
    return sys_days{days{floor_div(s.value, kHoursPerDay)}};
}

CivilHour to_civil(HourStamp s)
{
    const year_month_day ymd{to_date(s)};
    const auto hour = s.value - floor_div(s.value, kHoursPerDay) * kHoursPerDay;
    return CivilHour{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()), static_cast<unsigned>(hour)};
}

int calendar_year(HourStamp s)
{
    return int(year_month_day{to_date(s)}.year());
}

int day_of_week(HourStamp s)
{
    // iso_encoding: Monday = 1 ... Sunday = 7
    return static_cast<int>(weekday{to_date(s)}.iso_encoding()) - 1;
}

int hour_of_year(HourStamp s)
{
    const int y = calendar_year(s);
    const HourStamp jan1 = to_stamp({y, 1, 1, 0});
    return static_cast<int>(s - jan1) + 1;
}

bool is_winter(HourStamp s)
{
    const unsigned m = to_civil(s).month;
    return m == 12 || m == 1 || m == 2;
}

int event_year(HourStamp s)
{
    const auto c = to_civil(s);
    return c.month == 12 ? c.year + 1 : c.year;
}

UtcOffsetTable::UtcOffsetTable(int offset_hours)
    : entries_{{HourStamp{INT64_MIN}, offset_hours}}
{
}

UtcOffsetTable::UtcOffsetTable(std::vector<std::pair<HourStamp, int>> entries)
    : entries_(std::move(entries))
{
    if (entries_.empty()) throw InputError("UTC offset table is empty");
    std::sort(entries_.begin(), entries_.end());
    entries_.front().first = HourStamp{INT64_MIN};
}

int UtcOffsetTable::offset_at(HourStamp utc) const
{
    auto it = std::upper_bound(entries_.begin(), entries_.end(), utc,
                               [](HourStamp t, const auto& e) { return t < e.first; });
    return std::prev(it)->second;
}

HourStamp parse_timestamp(std::string_view raw, const UtcOffsetTable& offsets)
{
    const std::string_view text = trim(raw);
    std::size_t pos = 0;
    CivilHour c;
    c.year = read_int(text, pos, 4, raw);
    expect(text, pos, '-', raw);
    c.month = static_cast<unsigned>(read_int(text, pos, 2, raw));
    expect(text, pos, '-', raw);
    c.day = static_cast<unsigned>(read_int(text, pos, 2, raw));
    if (pos == text.size()) return to_stamp(c);
    if (text[pos] != 'T' && text[pos] != ' ')
        throw InputError(fmt::format("malformed timestamp '{}'", raw));
    ++pos;
    c.hour = static_cast<unsigned>(read_int(text, pos, 2, raw));
    for (int field = 0; field < 2 && pos < text.size() && text[pos] == ':'; ++field) {
        ++pos;
        if (read_int(text, pos, 2, raw) != 0)
            throw InputError(fmt::format("timestamp '{}' is not on a whole hour", raw));
    }
    HourStamp stamp = to_stamp(c);
    if (pos == text.size()) return stamp;

    if (text[pos] == 'Z' && pos + 1 == text.size()) return offsets.to_local(stamp);
    if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        const int oh = read_int(text, pos, 2, raw);
        int om = 0;
        if (pos < text.size()) {
            if (text[pos] == ':') ++pos;
            om = read_int(text, pos, 2, raw);
        }
        if (om != 0 || pos != text.size())
            throw InputError(fmt::format("unsupported UTC offset in '{}'", raw));
        const HourStamp utc = stamp + (-sign * oh);
        return offsets.to_local(utc);
    }
    throw InputError(fmt::format("malformed timestamp '{}'", raw));
}

std::string format_timestamp(HourStamp s)
{
    const auto c = to_civil(s);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:00", c.year, c.month, c.day, c.hour);
}

sys_days parse_date(std::string_view raw)
{
    const std::string_view text = trim(raw);
    std::size_t pos = 0;
    const int y = read_int(text, pos, 4, raw);
    expect(text, pos, '-', raw);
    const auto m = static_cast<unsigned>(read_int(text, pos, 2, raw));
    expect(text, pos, '-', raw);
    const auto d = static_cast<unsigned>(read_int(text, pos, 2, raw));
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (pos != text.size() || !ymd.ok()) throw InputError(fmt::format("invalid date '{}'", raw));
    return sys_days{ymd};
}

}  // namespace winterrisk
