#include "expectail/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "expectail/errors.hpp"

namespace expectail {

std::int64_t Date::serial() const {
  // Days-from-civil (proleptic Gregorian), epoch 1970-01-01.
  const int y = year - (month <= 2);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_serial(std::int64_t days) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

int Date::weekday() const {
  const std::int64_t s = serial();
  return static_cast<int>(((s % 7) + 7 + 4) % 7);  // 1970-01-01 is a Thursday
}

std::string Date::iso() const {
  std::ostringstream out;
  out << std::setfill('0') << std::setw(4) << year << '-' << std::setw(2) << month << '-'
      << std::setw(2) << day;
  return out.str();
}

Date parse_date(const std::string& text, const std::string& format) {
  std::tm tm{};
  std::istringstream in(text);
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) throw DataError("cannot parse date '" + text + "' with format " + format);
  const Date date{tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday};
  // Round-trip rejects out-of-range components std::get_time lets through.
  if (Date::from_serial(date.serial()) != date)
    throw DataError("invalid calendar date '" + text + "'");
  return date;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // Trim spaces and a possible trailing CR.
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

PriceSeries load_price_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: header row required");
  const auto header = split_csv_line(line);
  std::size_t date_col = header.size(), price_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.date_column) date_col = i;
    if (header[i] == schema.price_column) price_col = i;
  }
  if (date_col == header.size())
    throw DataError("missing date column '" + schema.date_column + "'");
  if (price_col == header.size())
    throw DataError("missing price column '" + schema.price_column + "'");

  std::vector<std::pair<Date, double>> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() <= std::max(date_col, price_col))
      throw DataError("line " + std::to_string(line_number) + ": too few fields");
    Date date;
    try {
      date = parse_date(fields[date_col], schema.date_format);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_number) + ": " + e.what());
    }
    double price = 0.0;
    try {
      std::size_t consumed = 0;
      price = std::stod(fields[price_col], &consumed);
      if (consumed != fields[price_col].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(line_number) + ": cannot parse price '" +
                      fields[price_col] + "'");
    }
    if (!(price > 0.0) || !std::isfinite(price))
      throw DataError("line " + std::to_string(line_number) + ": nonpositive price");
    rows.emplace_back(date, price);
  }
  if (rows.empty()) throw DataError("no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  PriceSeries out;
  out.dates.reserve(rows.size());
  out.prices.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first == rows[i - 1].first)
      throw DataError("duplicate date " + rows[i].first.iso());
    out.dates.push_back(rows[i].first);
    out.prices.push_back(rows[i].second);
  }
  return out;
}

PriceSeries load_price_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_price_csv(in, schema);
}

void LossReturnSeries::write_csv(std::ostream& out) const {
  out << "week_start,loss\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << week_starts[i].iso() << ',' << losses[i] << '\n';
}

LossReturnSeries weekly_loss_returns(const PriceSeries& prices, WeekConvention convention) {
  if (prices.dates.size() != prices.prices.size())
    throw DataError("dates and prices length mismatch");

  auto week_index = [&](const Date& d) -> std::int64_t {
    const std::int64_t s = d.serial();
    if (convention == WeekConvention::AnchoredSunday) {
      // Weeks run Sunday..Saturday; 1970-01-04 was a Sunday.
      const std::int64_t shifted = s - 3;
      return shifted >= 0 ? shifted / 7 : (shifted - 6) / 7;
    }
    // ISO weeks run Monday..Sunday.
    const std::int64_t shifted = s - 4;
    return shifted >= 0 ? shifted / 7 : (shifted - 6) / 7;
  };
  auto week_start = [&](std::int64_t w) {
    return Date::from_serial(convention == WeekConvention::AnchoredSunday ? w * 7 + 3
                                                                          : w * 7 + 4);
  };

  // Average prices within each nonempty week.
  std::vector<std::int64_t> weeks;
  std::vector<double> averages;
  std::size_t i = 0;
  while (i < prices.dates.size()) {
    const std::int64_t w = week_index(prices.dates[i]);
    double sum = 0.0;
    std::size_t count = 0;
    while (i < prices.dates.size() && week_index(prices.dates[i]) == w) {
      sum += prices.prices[i];
      ++count;
      ++i;
    }
    weeks.push_back(w);
    averages.push_back(sum / static_cast<double>(count));
  }
  if (weeks.size() < 2) throw DomainError("need at least two nonempty weeks");

  LossReturnSeries out;
  out.week_starts.reserve(weeks.size() - 1);
  out.losses.reserve(weeks.size() - 1);
  for (std::size_t w = 1; w < weeks.size(); ++w) {
    out.week_starts.push_back(week_start(weeks[w]));
    out.losses.push_back(-std::log(averages[w] / averages[w - 1]));
    out.spans_gap.push_back(weeks[w] != weeks[w - 1] + 1);
  }
  return out;
}

}  // namespace expectail
