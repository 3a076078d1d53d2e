#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace expectail {

/// Calendar date; only what price-series ingestion needs.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  /// Days since 1970-01-01 (proleptic Gregorian).
  std::int64_t serial() const;
  static Date from_serial(std::int64_t days);
  /// 0 = Sunday ... 6 = Saturday.
  int weekday() const;
  std::string iso() const;  // YYYY-MM-DD

  auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& text, const std::string& format = "%Y-%m-%d");

struct PriceSeries {
  std::vector<Date> dates;    // strictly increasing
  std::vector<double> prices;  // positive, same length
};

struct CsvSchema {
  std::string date_column = "date";
  std::string price_column = "price";
  std::string date_format = "%Y-%m-%d";
};

/// Parses and validates a headered CSV of daily prices: rows are sorted by
/// date, duplicate dates and nonpositive prices are rejected with the
/// offending line number.
PriceSeries load_price_csv(const std::string& path, const CsvSchema& schema = {});
PriceSeries load_price_csv(std::istream& in, const CsvSchema& schema);

enum class WeekConvention { AnchoredSunday, IsoWeek };

struct LossReturnSeries {
  std::vector<Date> week_starts;  // week of the *later* price in each return
  std::vector<double> losses;     // negative log-returns of weekly average prices
  std::vector<bool> spans_gap;    // true when empty weeks lie between the pair

  void write_csv(std::ostream& out) const;  // week_start,loss
};

/// Groups days into calendar weeks, averages prices within each week, and
/// emits losses l_w = -log(Pbar_w / Pbar_{w-1}) between consecutive nonempty
/// weeks. Empty weeks are skipped; the loss then spans the gap and is flagged.
LossReturnSeries weekly_loss_returns(const PriceSeries& prices,
                                     WeekConvention convention = WeekConvention::AnchoredSunday);

}  // namespace expectail
