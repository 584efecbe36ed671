#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace battmdp {

// Calendar instant at hour resolution (naive local time, no DST handling).
struct HourStamp {
    int year = 2019;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;   // 0..23

    // Hours since 1970-01-01T00:00.
    std::int64_t serial() const;
    static HourStamp from_serial(std::int64_t hours);
    HourStamp plus_hours(std::int64_t h) const { return from_serial(serial() + h); }

    // "YYYY-MM-DDTHH:00" / parse accepts 'T' or ' ' separator, optional ":MM".
    std::string to_string() const;
    static HourStamp parse(const std::string& text);

    bool operator==(const HourStamp&) const = default;
};

// Hourly electrical demand in kWh. Values are finite and nonnegative and
// the series covers whole days on a gapless hourly grid.
struct LoadSeries {
    HourStamp start;
    std::vector<double> values_kwh;

    static constexpr int period_hours = 24;

    std::size_t size() const { return values_kwh.size(); }
    std::size_t n_days() const { return values_kwh.size() / period_hours; }

    // Hour-of-day (0..23) of sample p.
    int hour_of_day(std::size_t p) const {
        return static_cast<int>((start.hour + p) % period_hours);
    }

    // Throws std::invalid_argument when a value is negative/non-finite or
    // the length is not a positive multiple of 24.
    void validate() const;
};

struct SyntheticLoadSpec {
    double base_kwh = 200.0;
    double daily_amplitude_kwh = 150.0;
    double seasonal_amplitude_kwh = 40.0;
    double noise_std_kwh = 20.0;
    std::uint64_t seed = 0;
    int n_days = 365;
};

// CSV schema: header "timestamp,load_kwh", one row per hour, ISO-8601 hour
// timestamps, '.' decimal separator. Gaps and negative loads are hard errors.
LoadSeries load_csv(const std::string& path);
void write_csv(const LoadSeries& series, const std::string& path);

// Deterministic in the spec (including the seed). One diurnal and one annual
// sinusoid plus Gaussian noise, clipped at zero.
LoadSeries generate_synthetic(const SyntheticLoadSpec& spec);

// First year -> train, second year -> test. With split_hours > 0 the series
// is cut at that sample instead (both parts must still be whole days).
std::pair<LoadSeries, LoadSeries> split_train_test(const LoadSeries& series,
                                                   std::int64_t split_hours = -1);

constexpr int hours_per_year = 8760;

}  // namespace battmdp
