#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace winterrisk {

/// Wall-clock hour counted from 1970-01-01 00:00 of the same clock.
///
/// Series in this project are carried in local civil time; an HourStamp is
/// just an ordinal hour on that clock, so consecutive hours differ by one.
struct HourStamp {
    std::int64_t value = 0;

    friend constexpr auto operator<=>(HourStamp, HourStamp) = default;
    constexpr HourStamp operator+(std::int64_t h) const { return {value + h}; }
    constexpr std::int64_t operator-(HourStamp o) const { return value - o.value; }
};

struct CivilHour {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;    // 1..31
    unsigned hour = 0;   // 0..23
};

HourStamp to_stamp(const CivilHour& c);
CivilHour to_civil(HourStamp s);

std::chrono::sys_days to_date(HourStamp s);

int calendar_year(HourStamp s);

/// Day of week with Monday = 0 ... Sunday = 6.
int day_of_week(HourStamp s);

/// 1-based hour of the year, 1..8784.
int hour_of_year(HourStamp s);

/// December, January and February.
bool is_winter(HourStamp s);

/// Winter seasons are labelled by the year holding January/February;
/// December hours belong to the following year's season.
int event_year(HourStamp s);

/// Fixed UTC offsets by validity start, used to bring zoned timestamps to
/// local time. The first entry applies to everything before later entries.
class UtcOffsetTable {
public:
    UtcOffsetTable() = default;
    explicit UtcOffsetTable(int offset_hours);
    UtcOffsetTable(std::vector<std::pair<HourStamp, int>> entries);

    int offset_at(HourStamp utc) const;
    HourStamp to_local(HourStamp utc) const { return utc + offset_at(utc); }

    static UtcOffsetTable us_central_standard() { return UtcOffsetTable(-6); }

private:
    std::vector<std::pair<HourStamp, int>> entries_{{HourStamp{INT64_MIN}, -6}};
};

/// Parses "YYYY-MM-DD[T ]HH[:MM[:SS]][Z|+HH:MM|-HH:MM]". Zoned values are
/// shifted into local time with `offsets`; unzoned values are taken as local.
/// Minutes and seconds must be zero. Throws InputError.
HourStamp parse_timestamp(std::string_view text, const UtcOffsetTable& offsets = {});

/// "YYYY-MM-DDTHH:00"
std::string format_timestamp(HourStamp s);

/// Parses "YYYY-MM-DD".
std::chrono::sys_days parse_date(std::string_view text);

}  // namespace winterrisk
