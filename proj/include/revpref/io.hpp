#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

/// Shortest decimal form that parses back to exactly the same double, so
/// written files are lossless and byte-stable across runs.
std::string format_double(double v);

/// Strict double parse of a full token; throws std::invalid_argument.
double parse_double(std::string_view token, std::string_view what);

std::vector<std::string> split_csv_line(const std::string& line);

/// Dataset CSV: header obs_id,p1..pK,x1..xK with K inferred from the header.
ChoiceDataset read_dataset_csv(std::istream& in, std::string label);
ChoiceDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const ChoiceDataset& ds, std::ostream& out);

/// Equivalent JSON array form: [{"obs_id":..., "prices":[...], "bundle":[...]}].
ChoiceDataset read_dataset_json(std::istream& in, std::string label);
ChoiceDataset read_dataset_json(const std::filesystem::path& path);
void write_dataset_json(const ChoiceDataset& ds, std::ostream& out);

/// Loads .csv or .json by extension; label defaults to the file stem.
ChoiceDataset read_dataset_file(const std::filesystem::path& path);

}  // namespace revpref
