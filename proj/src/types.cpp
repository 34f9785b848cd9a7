#include "rxledger/types.hpp"

#include "rxledger/error.hpp"

#include <charconv>
#include <cstdio>

namespace rxledger {

using namespace std::chrono;

std::int64_t to_millis(Timestamp t) noexcept { return t.time_since_epoch().count(); }

Timestamp from_millis(std::int64_t ms) noexcept { return Timestamp{milliseconds{ms}}; }

Date to_date(Timestamp t) noexcept { return year_month_day{floor<days>(t)}; }

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::InvalidArgument, "malformed date: " + std::string(text));
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error(ErrorCode::InvalidArgument, "malformed date: " + std::string(text));
    }
    Date d{year{parse_fixed(text, 0, 4)}, month{static_cast<unsigned>(parse_fixed(text, 5, 2))},
           day{static_cast<unsigned>(parse_fixed(text, 8, 2))}};
    if (!d.ok()) {
        throw Error(ErrorCode::InvalidArgument, "impossible date: " + std::string(text));
    }
    return d;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const auto day_point = floor<days>(t);
    const Date d{day_point};
    const hh_mm_ss tod{t - day_point};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d.%03dZ", format_date(d).c_str(),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()),
                  static_cast<int>(tod.subseconds().count()));
    return buf;
}

int whole_years(Date dob, Date on) noexcept {
    int years = static_cast<int>(on.year()) - static_cast<int>(dob.year());
    if (on.month() < dob.month() || (on.month() == dob.month() && on.day() < dob.day())) {
        --years;
    }
    return years;
}

Timestamp SystemClock::now() const { return time_point_cast<milliseconds>(system_clock::now()); }

}  // namespace rxledger
