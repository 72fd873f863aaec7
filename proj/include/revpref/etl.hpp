#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

/// One scanner line item: a single good bought in a single shopping instance.
struct TransactionRecord {
  std::string membership_id;
  std::string store_id;
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;
  int hour = 0;
  int minute = 0;
  int second = 0;
  std::string category;
  std::string subcategory;  // optional column, empty when absent
  double quantity = 0.0;    // kg
  double expenditure = 0.0;  // final, discount-inclusive
  std::optional<double> shelf_expenditure;
  std::optional<bool> discount_flag;

  /// Flag when present, otherwise inferred from shelf vs final price.
  bool discounted() const;
};

/// Months as a linear index so ranges and consecutive runs are arithmetic.
int month_index(int year, int month);
std::string month_label(int index);  // "YYYY-MM"
int parse_month(const std::string& text);

struct MonthRange {
  int first = 0;
  int last = 0;  // inclusive
  bool contains(int idx) const { return idx >= first && idx <= last; }
};

/// "YYYY-MM:YYYY-MM"
MonthRange parse_month_range(const std::string& text);

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct TransactionParseResult {
  std::vector<TransactionRecord> records;
  std::vector<ParseIssue> issues;     // malformed rows (kept only when lenient)
  std::size_t dropped_zero_rows = 0;  // zero-quantity / zero-expenditure items
};

/// CSV header: membership_id,store_id,timestamp,category,quantity_kg,
/// expenditure,shelf_expenditure,discount_flag (an optional subcategory
/// column may follow). Timestamps are "YYYY-MM-DD HH:MM:SS" (T separator
/// also accepted). In strict mode the first malformed row throws; in lenient
/// mode malformed rows are collected and valid rows retained.
TransactionParseResult parse_transactions(std::istream& in, bool lenient = false);
TransactionParseResult parse_transactions(const std::filesystem::path& path,
                                          bool lenient = false);

/// One aggregated consumer-category-month: total quantity and the
/// quantity-weighted average price (total expenditure / total quantity).
struct MonthlyCell {
  std::string consumer;
  std::string category;
  int month = 0;  // month_index
  double quantity = 0.0;
  double price = 0.0;
};

std::vector<MonthlyCell> aggregate_cells(const std::vector<TransactionRecord>& records,
                                         const std::vector<std::string>& categories,
                                         const MonthRange& window,
                                         bool use_shelf = false);

/// Per-consumer monthly budget datasets over the requested categories. A
/// month is included only when the consumer bought a positive quantity in
/// every category; observations are ordered by month with obs_id "YYYY-MM".
std::map<std::string, ChoiceDataset> monthly_aggregate(
    const std::vector<TransactionRecord>& records,
    const std::vector<std::string>& categories, const MonthRange& window,
    bool use_shelf = false);

/// Keeps consumers with a run of months_required consecutive covered months
/// (first such run scanning from the window start) and truncates each kept
/// dataset to exactly that span.
std::map<std::string, ChoiceDataset> filter_consecutive(
    const std::map<std::string, ChoiceDataset>& datasets, int months_required);

enum class Scenario { season, year, working_day, meal_time, discount };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario scenario);

/// Holiday dates, one "date,label" row per holiday (ISO dates).
struct HolidayCalendar {
  std::set<int> days;  // encoded y*10000 + m*100 + d
  bool contains(int y, int m, int d) const {
    return days.count(y * 10000 + m * 100 + d) > 0;
  }
};

HolidayCalendar load_holiday_csv(std::istream& in);
HolidayCalendar load_holiday_csv(const std::filesystem::path& path);

/// Deterministic partition of records by scenario rule: meteorological
/// seasons (Dec attached to the following winter), calendar years, working
/// vs non-working days (weekends and calendar holidays excluded), meal time
/// [10:00,14:00) u [16:00,19:00), and discounted vs non-discounted.
/// working_day requires a calendar.
std::vector<std::pair<std::string, std::vector<TransactionRecord>>> split_scenario(
    const std::vector<TransactionRecord>& records, Scenario scenario,
    const HolidayCalendar* calendar = nullptr);

/// Population-level price for a category-month: total expenditure over total
/// quantity across all consumers. Throws on an empty cell.
double aggregate_price_index(const std::vector<TransactionRecord>& records,
                             const std::string& category, int month);

}  // namespace revpref
