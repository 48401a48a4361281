#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace epsim::cli {

using json = nlohmann::json;

// Formats with %.12g — enough digits to round-trip meaningful precision while
// keeping output byte-stable across runs.
std::string format_number(double value);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

void write_csv(const std::string& path, const Table& table);
void write_json(const std::string& path, const json& document);
void write_text(const std::string& path, const std::string& text);

}  // namespace epsim::cli
