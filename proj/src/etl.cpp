#include "revpref/etl.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "revpref/io.hpp"

namespace revpref {

bool TransactionRecord::discounted() const {
  if (discount_flag.has_value()) return *discount_flag;
  return shelf_expenditure.has_value() && *shelf_expenditure > expenditure + 1e-9;
}

int month_index(int year, int month) { return year * 12 + (month - 1); }

std::string month_label(int index) {
  const int year = index / 12;
  const int month = index % 12 + 1;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

namespace {

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

bool valid_date(int y, int mo, int d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                        std::chrono::day{unsigned(d)}};
  return ymd.ok();
}

}  // namespace

int parse_month(const std::string& text) {
  if (text.size() != 7 || text[4] != '-') {
    throw std::invalid_argument("invalid month '" + text + "', expected YYYY-MM");
  }
  const int y = parse_int(std::string_view(text).substr(0, 4), "year");
  const int m = parse_int(std::string_view(text).substr(5, 2), "month");
  if (m < 1 || m > 12) throw std::invalid_argument("invalid month '" + text + "'");
  return month_index(y, m);
}

MonthRange parse_month_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("invalid window '" + text + "', expected YYYY-MM:YYYY-MM");
  }
  MonthRange range;
  range.first = parse_month(text.substr(0, colon));
  range.last = parse_month(text.substr(colon + 1));
  if (range.last < range.first) {
    throw std::invalid_argument("window end precedes start in '" + text + "'");
  }
  return range;
}

namespace {

void parse_timestamp(const std::string& text, TransactionRecord& rec) {
  // YYYY-MM-DD HH:MM:SS with ' ' or 'T' between date and time
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' ||
      (text[10] != ' ' && text[10] != 'T') || text[13] != ':' || text[16] != ':') {
    throw std::invalid_argument("unparsable timestamp '" + text + "'");
  }
  const std::string_view s(text);
  rec.year = parse_int(s.substr(0, 4), "year");
  rec.month = parse_int(s.substr(5, 2), "month");
  rec.day = parse_int(s.substr(8, 2), "day");
  rec.hour = parse_int(s.substr(11, 2), "hour");
  rec.minute = parse_int(s.substr(14, 2), "minute");
  rec.second = parse_int(s.substr(17, 2), "second");
  if (rec.month < 1 || rec.month > 12 || !valid_date(rec.year, rec.month, rec.day) ||
      rec.hour > 23 || rec.minute > 59 || rec.second > 60) {
    throw std::invalid_argument("unparsable timestamp '" + text + "'");
  }
}

std::optional<bool> parse_flag(const std::string& field) {
  if (field.empty()) return std::nullopt;
  if (field == "1" || field == "true" || field == "TRUE" || field == "True") return true;
  if (field == "0" || field == "false" || field == "FALSE" || field == "False") return false;
  throw std::invalid_argument("invalid discount_flag '" + field + "'");
}

constexpr const char* kTxnColumns[] = {
    "membership_id", "store_id",    "timestamp",         "category",
    "quantity_kg",   "expenditure", "shelf_expenditure", "discount_flag",
};

TransactionRecord parse_txn_row(const std::vector<std::string>& fields, bool has_subcategory) {
  TransactionRecord rec;
  rec.membership_id = fields[0];
  rec.store_id = fields[1];
  parse_timestamp(fields[2], rec);
  rec.category = fields[3];
  rec.quantity = parse_double(fields[4], "quantity_kg");
  rec.expenditure = parse_double(fields[5], "expenditure");
  if (!fields[6].empty()) {
    rec.shelf_expenditure = parse_double(fields[6], "shelf_expenditure");
  }
  rec.discount_flag = parse_flag(fields[7]);
  if (has_subcategory) rec.subcategory = fields[8];
  if (rec.quantity < 0.0) throw std::invalid_argument("negative quantity");
  if (rec.expenditure < 0.0) throw std::invalid_argument("negative expenditure");
  if (rec.shelf_expenditure && *rec.shelf_expenditure < rec.expenditure - 1e-9) {
    throw std::invalid_argument("shelf_expenditure below expenditure");
  }
  return rec;
}

}  // namespace

TransactionParseResult parse_transactions(std::istream& in, bool lenient) {
  TransactionParseResult out;
  std::string line;
  if (!std::getline(in, line)) return out;  // empty file: empty list
  const auto header = split_csv_line(line);
  const bool has_subcategory = header.size() == 9 && header[8] == "subcategory";
  if (header.size() != 8 && !has_subcategory) {
    throw std::invalid_argument("transaction header must list the 8 standard columns");
  }
  for (std::size_t c = 0; c < 8; ++c) {
    if (header[c] != kTxnColumns[c]) {
      throw std::invalid_argument(std::string("missing column '") + kTxnColumns[c] + "'");
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      const auto fields = split_csv_line(line);
      if (fields.size() != header.size()) {
        throw std::invalid_argument("expected " + std::to_string(header.size()) + " fields");
      }
      TransactionRecord rec = parse_txn_row(fields, has_subcategory);
      if (rec.quantity <= 0.0 || rec.expenditure <= 0.0) {
        ++out.dropped_zero_rows;
        continue;
      }
      out.records.push_back(std::move(rec));
    } catch (const std::invalid_argument& err) {
      if (!lenient) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + err.what());
      }
      out.issues.push_back({line_no, err.what()});
    }
  }
  return out;
}

TransactionParseResult parse_transactions(const std::filesystem::path& path, bool lenient) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return parse_transactions(in, lenient);
}

std::vector<MonthlyCell> aggregate_cells(const std::vector<TransactionRecord>& records,
                                         const std::vector<std::string>& categories,
                                         const MonthRange& window, bool use_shelf) {
  if (categories.empty()) throw std::invalid_argument("at least one category required");
  // (consumer, category position, month) -> (quantity, expenditure)
  std::map<std::tuple<std::string, std::size_t, int>, std::pair<double, double>> acc;
  for (const auto& rec : records) {
    const int m = month_index(rec.year, rec.month);
    if (!window.contains(m)) continue;
    const auto cat = std::find(categories.begin(), categories.end(), rec.category);
    if (cat == categories.end()) continue;
    const double spend =
        use_shelf ? rec.shelf_expenditure.value_or(rec.expenditure) : rec.expenditure;
    auto& cell = acc[{rec.membership_id, static_cast<std::size_t>(cat - categories.begin()), m}];
    cell.first += rec.quantity;
    cell.second += spend;
  }
  std::vector<MonthlyCell> cells;
  cells.reserve(acc.size());
  for (const auto& [key, qe] : acc) {
    if (qe.first <= 0.0) continue;
    MonthlyCell cell;
    cell.consumer = std::get<0>(key);
    cell.category = categories[std::get<1>(key)];
    cell.month = std::get<2>(key);
    cell.quantity = qe.first;
    cell.price = qe.second / qe.first;
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::map<std::string, ChoiceDataset> monthly_aggregate(
    const std::vector<TransactionRecord>& records,
    const std::vector<std::string>& categories, const MonthRange& window,
    bool use_shelf) {
  const std::vector<MonthlyCell> cells = aggregate_cells(records, categories, window, use_shelf);
  const std::size_t k = categories.size();

  // (consumer, month) -> per-category (price, quantity)
  struct MonthData {
    std::vector<double> price, quantity;
    std::size_t filled = 0;
  };
  std::map<std::string, std::map<int, MonthData>> by_consumer;
  for (const auto& cell : cells) {
    auto& md = by_consumer[cell.consumer][cell.month];
    if (md.price.empty()) {
      md.price.assign(k, 0.0);
      md.quantity.assign(k, 0.0);
    }
    const std::size_t pos =
        std::find(categories.begin(), categories.end(), cell.category) - categories.begin();
    md.price[pos] = cell.price;
    md.quantity[pos] = cell.quantity;
    ++md.filled;
  }

  std::map<std::string, ChoiceDataset> out;
  for (auto& [consumer, months] : by_consumer) {
    ChoiceDataset ds;
    ds.label = consumer;
    for (auto& [m, md] : months) {
      if (md.filled != k) continue;  // coverage rule: every category positive
      Observation obs;
      obs.obs_id = month_label(m);
      obs.prices = md.price;
      obs.bundle = md.quantity;
      ds.observations.push_back(std::move(obs));
    }
    if (!ds.observations.empty()) out.emplace(consumer, std::move(ds));
  }
  return out;
}

std::map<std::string, ChoiceDataset> filter_consecutive(
    const std::map<std::string, ChoiceDataset>& datasets, int months_required) {
  if (months_required < 1) {
    throw std::invalid_argument("months_required must be at least 1");
  }
  const auto need = static_cast<std::size_t>(months_required);
  std::map<std::string, ChoiceDataset> out;
  for (const auto& [consumer, ds] : datasets) {
    // observations are month-ordered; keep the first run of consecutive
    // months long enough, truncated to exactly the required span
    const auto& obs = ds.observations;
    std::size_t i = 0;
    while (i < obs.size()) {
      std::size_t j = i + 1;
      while (j < obs.size() &&
             parse_month(obs[j].obs_id) == parse_month(obs[j - 1].obs_id) + 1) {
        ++j;
      }
      if (j - i >= need) {
        ChoiceDataset kept;
        kept.label = ds.label;
        kept.observations.assign(obs.begin() + i, obs.begin() + i + need);
        out.emplace(consumer, std::move(kept));
        break;
      }
      i = j;
    }
  }
  return out;
}

Scenario parse_scenario(const std::string& name) {
  if (name == "season") return Scenario::season;
  if (name == "year") return Scenario::year;
  if (name == "working_day") return Scenario::working_day;
  if (name == "meal_time") return Scenario::meal_time;
  if (name == "discount") return Scenario::discount;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::season: return "season";
    case Scenario::year: return "year";
    case Scenario::working_day: return "working_day";
    case Scenario::meal_time: return "meal_time";
    case Scenario::discount: return "discount";
  }
  return "?";
}

HolidayCalendar load_holiday_csv(std::istream& in) {
  HolidayCalendar cal;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1 && fields[0] == "date") continue;  // optional header
    const std::string& date = fields[0];
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": invalid holiday date '" + date + "'");
    }
    const int y = parse_int(std::string_view(date).substr(0, 4), "year");
    const int m = parse_int(std::string_view(date).substr(5, 2), "month");
    const int d = parse_int(std::string_view(date).substr(8, 2), "day");
    cal.days.insert(y * 10000 + m * 100 + d);
  }
  return cal;
}

HolidayCalendar load_holiday_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return load_holiday_csv(in);
}

namespace {

std::string season_of(int month) {
  if (month >= 3 && month <= 5) return "spring";
  if (month >= 6 && month <= 8) return "summer";
  if (month >= 9 && month <= 11) return "fall";
  return "winter";
}

bool is_weekend(const TransactionRecord& rec) {
  const std::chrono::year_month_day ymd{std::chrono::year{rec.year},
                                        std::chrono::month{unsigned(rec.month)},
                                        std::chrono::day{unsigned(rec.day)}};
  const std::chrono::weekday wd{std::chrono::sys_days{ymd}};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

bool in_meal_time(const TransactionRecord& rec) {
  const int t = rec.hour * 60 + rec.minute;
  return (t >= 10 * 60 && t < 14 * 60) || (t >= 16 * 60 && t < 19 * 60);
}

}  // namespace

std::vector<std::pair<std::string, std::vector<TransactionRecord>>> split_scenario(
    const std::vector<TransactionRecord>& records, Scenario scenario,
    const HolidayCalendar* calendar) {
  if (scenario == Scenario::working_day && calendar == nullptr) {
    throw std::invalid_argument("working_day scenario requires a holiday calendar");
  }

  auto label_of = [&](const TransactionRecord& rec) -> std::string {
    switch (scenario) {
      case Scenario::season:
        return season_of(rec.month);
      case Scenario::year:
        return std::to_string(rec.year);
      case Scenario::working_day:
        return !is_weekend(rec) && !calendar->contains(rec.year, rec.month, rec.day)
                   ? "working"
                   : "nonworking";
      case Scenario::meal_time:
        return in_meal_time(rec) ? "meal" : "nonmeal";
      case Scenario::discount:
        return rec.discounted() ? "discounted" : "nondiscounted";
    }
    return "?";
  };

  std::vector<std::string> labels;
  switch (scenario) {
    case Scenario::season:
      labels = {"spring", "summer", "fall", "winter"};
      break;
    case Scenario::year: {
      std::set<int> years;
      for (const auto& rec : records) years.insert(rec.year);
      for (int y : years) labels.push_back(std::to_string(y));
      break;
    }
    case Scenario::working_day:
      labels = {"working", "nonworking"};
      break;
    case Scenario::meal_time:
      labels = {"meal", "nonmeal"};
      break;
    case Scenario::discount:
      labels = {"discounted", "nondiscounted"};
      break;
  }

  std::vector<std::pair<std::string, std::vector<TransactionRecord>>> parts;
  parts.reserve(labels.size());
  for (const auto& label : labels) parts.emplace_back(label, std::vector<TransactionRecord>{});
  for (const auto& rec : records) {
    const std::string label = label_of(rec);
    for (auto& [part_label, part_records] : parts) {
      if (part_label == label) {
        part_records.push_back(rec);
        break;
      }
    }
  }
  return parts;
}

double aggregate_price_index(const std::vector<TransactionRecord>& records,
                             const std::string& category, int month) {
  double quantity = 0.0;
  double spend = 0.0;
  for (const auto& rec : records) {
    if (rec.category != category || month_index(rec.year, rec.month) != month) continue;
    quantity += rec.quantity;
    spend += rec.expenditure;
  }
  if (quantity <= 0.0) {
    throw std::invalid_argument("aggregate_price_index: no quantity for " + category +
                                " in " + month_label(month));
  }
  return spend / quantity;
}

}  // namespace revpref
