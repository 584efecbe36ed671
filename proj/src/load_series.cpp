#include "battmdp/load_series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace battmdp {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

[[noreturn]] void fail_row(const std::string& path, std::size_t row, const std::string& what) {
    std::ostringstream os;
    os << path << ": row " << row << ": " << what;
    throw std::invalid_argument(os.str());
}

}  // namespace

std::int64_t HourStamp::serial() const {
    return days_from_civil(year, month, day) * 24 + hour;
}

HourStamp HourStamp::from_serial(std::int64_t hours) {
    HourStamp t;
    std::int64_t days = hours / 24;
    std::int64_t h = hours % 24;
    if (h < 0) {
        h += 24;
        days -= 1;
    }
    t.hour = static_cast<int>(h);
    civil_from_days(days, t.year, t.month, t.day);
    return t;
}

std::string HourStamp::to_string() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", year, month, day, hour);
    return buf;
}

HourStamp HourStamp::parse(const std::string& text) {
    HourStamp t;
    int minute = 0;
    char sep = 0;
    int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d", &t.year, &t.month, &t.day, &sep,
                        &t.hour, &minute);
    if (n < 5 || (sep != 'T' && sep != ' ') || minute != 0) {
        throw std::invalid_argument("bad timestamp: '" + text + "'");
    }
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 || t.hour < 0 || t.hour > 23) {
        throw std::invalid_argument("timestamp out of range: '" + text + "'");
    }
    return t;
}

void LoadSeries::validate() const {
    if (values_kwh.empty() || values_kwh.size() % period_hours != 0) {
        throw std::invalid_argument("series length must be a positive multiple of 24");
    }
    for (std::size_t p = 0; p < values_kwh.size(); ++p) {
        const double v = values_kwh[p];
        if (!std::isfinite(v) || v < 0) {
            throw std::invalid_argument("load value at sample " + std::to_string(p) +
                                        " is negative or non-finite");
        }
    }
}

LoadSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,load_kwh") {
        throw std::invalid_argument(path + ": expected header 'timestamp,load_kwh'");
    }

    LoadSeries series;
    std::size_t row = 1;  // header was row 1
    std::int64_t expected_serial = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) fail_row(path, row, "missing comma");

        HourStamp ts;
        try {
            ts = HourStamp::parse(line.substr(0, comma));
        } catch (const std::exception& e) {
            fail_row(path, row, e.what());
        }

        const std::string value_text = line.substr(comma + 1);
        char* end = nullptr;
        const double v = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str() || (end && *end != '\0')) {
            fail_row(path, row, "bad load value '" + value_text + "'");
        }
        if (!std::isfinite(v)) fail_row(path, row, "non-finite load value");
        if (v < 0) fail_row(path, row, "negative load value");

        if (series.values_kwh.empty()) {
            series.start = ts;
            expected_serial = ts.serial();
        } else if (ts.serial() != expected_serial) {
            fail_row(path, row, "expected " + HourStamp::from_serial(expected_serial).to_string() +
                                    ", got " + ts.to_string() + " (non-hourly gap)");
        }
        series.values_kwh.push_back(v);
        ++expected_serial;
    }
    series.validate();
    return series;
}

void write_csv(const LoadSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp,load_kwh\n";
    char buf[48];
    for (std::size_t p = 0; p < series.size(); ++p) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.values_kwh[p]);
        out << series.start.plus_hours(static_cast<std::int64_t>(p)).to_string() << ',' << buf
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LoadSeries generate_synthetic(const SyntheticLoadSpec& spec) {
    if (spec.n_days < 1) throw std::invalid_argument("n_days must be >= 1");
    LoadSeries series;
    series.start = HourStamp{2019, 1, 1, 0};
    series.values_kwh.resize(static_cast<std::size_t>(spec.n_days) * 24);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t p = 0; p < series.values_kwh.size(); ++p) {
        const double hour = static_cast<double>(p % 24);
        const double day = static_cast<double>(p / 24);
        // Diurnal peak in the mid-afternoon, trough before dawn.
        const double diurnal = std::sin(two_pi * (hour - 9.0) / 24.0);
        const double annual = std::sin(two_pi * day / 365.0);
        double v = spec.base_kwh + spec.daily_amplitude_kwh * diurnal +
                   spec.seasonal_amplitude_kwh * annual;
        if (spec.noise_std_kwh > 0) v += spec.noise_std_kwh * noise(rng);
        series.values_kwh[p] = std::max(0.0, v);
    }
    return series;
}

std::pair<LoadSeries, LoadSeries> split_train_test(const LoadSeries& series,
                                                   std::int64_t split_hours) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    std::int64_t cut = split_hours;
    if (cut < 0) {
        if (n < 2 * hours_per_year) {
            throw std::invalid_argument(
                "series shorter than two years; pass an explicit split point");
        }
        cut = hours_per_year;
    }
    if (cut <= 0 || cut >= n || cut % 24 != 0 || (n - cut) % 24 != 0) {
        throw std::invalid_argument("split point must cut the series into whole, nonempty days");
    }

    LoadSeries train{series.start,
                     {series.values_kwh.begin(), series.values_kwh.begin() + cut}};
    std::int64_t test_len = n - cut;
    if (split_hours < 0) test_len = std::min<std::int64_t>(test_len, hours_per_year);
    LoadSeries test{series.start.plus_hours(cut),
                    {series.values_kwh.begin() + cut,
                     series.values_kwh.begin() + cut + test_len}};
    return {std::move(train), std::move(test)};
}

}  // namespace battmdp
