#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epsim/coherent.hpp"
#include "epsim/lattice.hpp"
#include "epsim/types.hpp"

namespace epsim::cli {

using nlohmann::json;

json load_config(const std::string& path);

// Applies "dotted.path=value" to the document; the value is parsed as JSON
// when possible and kept as a string otherwise. Returns the pair recorded in
// run metadata.
std::pair<std::string, json> apply_override(json& config, const std::string& spec);

// Read-only cursor into the config document that carries its field path so
// every complaint names the offending field.
class ConfigView {
 public:
  ConfigView(const json& node, std::string path) : node_(&node), path_(std::move(path)) {}

  const json& raw() const { return *node_; }
  const std::string& path() const { return path_; }

  bool has(const std::string& key) const;
  ConfigView at(const std::string& key) const;                 // required key
  std::optional<ConfigView> maybe(const std::string& key) const;

  double as_number() const;
  int as_int() const;
  bool as_bool() const;
  std::string as_string() const;
  std::vector<double> as_number_list() const;
  std::vector<int> as_int_list() const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  const json* node_;
  std::string path_;
};

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
  bool is_range = false;  // false: single value in `min`

  std::vector<double> values() const;
};

// Accepts a plain number (single point) or {min, max, steps}.
GridSpec parse_grid(const ConfigView& view);
GridSpec require_range(const ConfigView& view);
double require_single(const ConfigView& view);

LatticeSpec parse_lattice(const ConfigView& view);

// Accepts a plain number (magnitude) or {magnitude, phase}.
Complex parse_alpha(const ConfigView& view);

std::vector<int> parse_photon_numbers(const ConfigView& view);

// Launch amplitudes: alpha times a unit shape described by options.input:
//   {"type": "exceptional-mode", "gamma_c": G}  coalescent mode at G
//   {"type": "mode", "index": m}                guide m (1-based)
//   {"type": "amplitudes", "re": [...], "im": [...]}  given shape, normalized
Vector resolve_input(const LatticeSpec& spec, const ConfigView& input, Complex alpha);

}  // namespace epsim::cli
