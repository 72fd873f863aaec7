#include "revpref/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace revpref {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("invalid number for " + std::string(what) + ": '" +
                                std::string(token) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

namespace {

ChoiceDataset finish_dataset(ChoiceDataset ds) {
  validate_dataset(ds);
  return ds;
}

}  // namespace

ChoiceDataset read_dataset_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "obs_id" || header.size() % 2 == 0) {
    throw std::invalid_argument("dataset header must be obs_id,p1..pK,x1..xK");
  }
  const std::size_t goods = (header.size() - 1) / 2;
  for (std::size_t k = 0; k < goods; ++k) {
    if (header[1 + k] != "p" + std::to_string(k + 1) ||
        header[1 + goods + k] != "x" + std::to_string(k + 1)) {
      throw std::invalid_argument("dataset header must be obs_id,p1..pK,x1..xK");
    }
  }

  ChoiceDataset ds;
  ds.label = std::move(label);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " fields");
    }
    Observation obs;
    obs.obs_id = fields[0];
    for (std::size_t k = 0; k < goods; ++k) {
      obs.prices.push_back(parse_double(fields[1 + k], "price"));
      obs.bundle.push_back(parse_double(fields[1 + goods + k], "quantity"));
    }
    ds.observations.push_back(std::move(obs));
  }
  return finish_dataset(std::move(ds));
}

ChoiceDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return read_dataset_csv(in, path.stem().string());
}

void write_dataset_csv(const ChoiceDataset& ds, std::ostream& out) {
  const std::size_t goods = ds.goods();
  out << "obs_id";
  for (std::size_t k = 1; k <= goods; ++k) out << ",p" << k;
  for (std::size_t k = 1; k <= goods; ++k) out << ",x" << k;
  out << "\n";
  for (const auto& obs : ds.observations) {
    out << obs.obs_id;
    for (double p : obs.prices) out << ',' << format_double(p);
    for (double x : obs.bundle) out << ',' << format_double(x);
    out << "\n";
  }
}

ChoiceDataset read_dataset_json(std::istream& in, std::string label) {
  nlohmann::json j;
  in >> j;
  if (!j.is_array()) throw std::invalid_argument("dataset JSON must be an array");
  ChoiceDataset ds;
  ds.label = std::move(label);
  for (const auto& item : j) {
    Observation obs;
    obs.obs_id = item.at("obs_id").is_string()
                     ? item.at("obs_id").get<std::string>()
                     : item.at("obs_id").dump();
    obs.prices = item.at("prices").get<std::vector<double>>();
    obs.bundle = item.at("bundle").get<std::vector<double>>();
    ds.observations.push_back(std::move(obs));
  }
  return finish_dataset(std::move(ds));
}

ChoiceDataset read_dataset_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return read_dataset_json(in, path.stem().string());
}

void write_dataset_json(const ChoiceDataset& ds, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& obs : ds.observations) {
    nlohmann::json item;
    item["obs_id"] = obs.obs_id;
    item["prices"] = obs.prices;
    item["bundle"] = obs.bundle;
    arr.push_back(std::move(item));
  }
  out << arr.dump(2) << "\n";
}

ChoiceDataset read_dataset_file(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return read_dataset_json(path);
  return read_dataset_csv(path);
}

}  // namespace revpref
