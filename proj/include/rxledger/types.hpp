#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace rxledger {

/// Integer surrogate key tagged by the entity it identifies.
template <class Tag>
struct Id {
    std::int64_t value = 0;

    constexpr bool valid() const noexcept { return value > 0; }
    friend constexpr auto operator<=>(const Id&, const Id&) = default;
};

using DrugId = Id<struct DrugTag>;
using PatientId = Id<struct PatientTag>;
using PharmacyId = Id<struct PharmacyTag>;
using NoteId = Id<struct NoteTag>;
using MedId = Id<struct MedTag>;
using RxId = Id<struct RxTag>;
using CaseId = Id<struct CaseTag>;

template <class Tag>
void to_json(nlohmann::json& j, const Id<Tag>& id) {
    j = id.value;
}

template <class Tag>
void from_json(const nlohmann::json& j, Id<Tag>& id) {
    id.value = j.get<std::int64_t>();
}

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::year_month_day;

std::int64_t to_millis(Timestamp t) noexcept;
Timestamp from_millis(std::int64_t ms) noexcept;

/// UTC calendar date of a timestamp.
Date to_date(Timestamp t) noexcept;

/// "YYYY-MM-DD"; throws Error(InvalidArgument) on malformed or impossible dates.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_timestamp(Timestamp t);

/// Completed years between `dob` and `on`; negative when dob is after on.
int whole_years(Date dob, Date on) noexcept;

/// Source of "now" for every module. Tests drive a ManualClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
    Date today() const { return to_date(now()); }
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

/// Deterministic clock; advances only when told to. Thread-safe.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start) : now_(start) {}

    Timestamp now() const override {
        std::lock_guard lock(mutex_);
        return now_;
    }
    void set(Timestamp t) {
        std::lock_guard lock(mutex_);
        now_ = t;
    }
    void advance(std::chrono::milliseconds d) {
        std::lock_guard lock(mutex_);
        now_ += d;
    }

private:
    mutable std::mutex mutex_;
    Timestamp now_;
};

}  // namespace rxledger

template <class Tag>
struct std::hash<rxledger::Id<Tag>> {
    std::size_t operator()(const rxledger::Id<Tag>& id) const noexcept {
        return std::hash<std::int64_t>{}(id.value);
    }
};
