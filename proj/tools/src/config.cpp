#include "config.hpp"

#include <cmath>
#include <fstream>

namespace epsim::cli {

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path + "': " + e.what());
  }
}

std::pair<std::string, json> apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("override '" + spec + "': expected key.path=value");
  const std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // plain string
  }

  json* node = &config;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty())
      throw ValidationError("override '" + spec + "': empty path segment");
    if (!node->is_object() && !node->is_null())
      throw ValidationError("override '" + spec + "': '" + key.substr(0, start) +
                            "' is not an object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  return {key, value};
}

bool ConfigView::has(const std::string& key) const {
  return node_->is_object() && node_->contains(key);
}

ConfigView ConfigView::at(const std::string& key) const {
  if (!node_->is_object()) fail("expected an object");
  if (!node_->contains(key)) fail("missing required field '" + key + "'");
  return ConfigView((*node_)[key], path_.empty() ? key : path_ + "." + key);
}

std::optional<ConfigView> ConfigView::maybe(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

double ConfigView::as_number() const {
  if (!node_->is_number()) fail("expected a number");
  return node_->get<double>();
}

int ConfigView::as_int() const {
  if (!node_->is_number_integer()) fail("expected an integer");
  return node_->get<int>();
}

bool ConfigView::as_bool() const {
  if (!node_->is_boolean()) fail("expected a boolean");
  return node_->get<bool>();
}

std::string ConfigView::as_string() const {
  if (!node_->is_string()) fail("expected a string");
  return node_->get<std::string>();
}

std::vector<double> ConfigView::as_number_list() const {
  if (!node_->is_array()) fail("expected an array of numbers");
  std::vector<double> out;
  for (size_t k = 0; k < node_->size(); ++k) {
    const json& item = (*node_)[k];
    if (!item.is_number()) fail("element " + std::to_string(k) + " is not a number");
    out.push_back(item.get<double>());
  }
  return out;
}

std::vector<int> ConfigView::as_int_list() const {
  if (!node_->is_array()) fail("expected an array of integers");
  std::vector<int> out;
  for (size_t k = 0; k < node_->size(); ++k) {
    const json& item = (*node_)[k];
    if (!item.is_number_integer())
      fail("element " + std::to_string(k) + " is not an integer");
    out.push_back(item.get<int>());
  }
  return out;
}

void ConfigView::fail(const std::string& message) const {
  throw ValidationError("config: " + (path_.empty() ? "<root>" : path_) + ": " +
                        message);
}

std::vector<double> GridSpec::values() const {
  if (!is_range || steps == 1) return {min};
  std::vector<double> out(steps);
  for (int t = 0; t < steps; ++t)
    out[t] = min + (max - min) * static_cast<double>(t) / (steps - 1);
  return out;
}

GridSpec parse_grid(const ConfigView& view) {
  GridSpec grid;
  if (view.raw().is_number()) {
    grid.min = grid.max = view.as_number();
    grid.steps = 1;
    grid.is_range = false;
    return grid;
  }
  if (!view.raw().is_object()) view.fail("expected a number or {min, max, steps}");
  grid.min = view.at("min").as_number();
  grid.max = view.at("max").as_number();
  grid.steps = view.at("steps").as_int();
  grid.is_range = true;
  if (grid.steps < 1) view.fail("steps must be >= 1");
  if (grid.steps == 1 && grid.min != grid.max)
    view.fail("steps == 1 requires min == max");
  if (grid.min > grid.max) view.fail("min must not exceed max");
  return grid;
}

GridSpec require_range(const ConfigView& view) {
  GridSpec grid = parse_grid(view);
  if (!grid.is_range) view.fail("expected a {min, max, steps} range");
  return grid;
}

double require_single(const ConfigView& view) {
  GridSpec grid = parse_grid(view);
  if (grid.is_range && grid.steps != 1) view.fail("expected a single value");
  return grid.min;
}

LatticeSpec parse_lattice(const ConfigView& view) {
  LatticeSpec spec;
  spec.modes = view.at("modes").as_int();
  spec.kappa = view.at("kappa").as_number();
  spec.beta = view.has("beta") ? view.at("beta").as_number() : 0.0;
  spec.loss = view.at("loss").as_number_list();
  if (auto boundary = view.maybe("boundary")) {
    const std::string text = boundary->as_string();
    if (text == "open")
      spec.boundary = Boundary::Open;
    else if (text == "periodic")
      spec.boundary = Boundary::Periodic;
    else
      boundary->fail("expected \"open\" or \"periodic\"");
  }
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    std::string message = e.what();
    const std::string prefix = "lattice: ";
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    view.fail(message);
  }
  return spec;
}

Complex parse_alpha(const ConfigView& view) {
  double magnitude = 0.0, phase = 0.0;
  if (view.raw().is_number()) {
    magnitude = view.as_number();
  } else if (view.raw().is_object()) {
    magnitude = view.at("magnitude").as_number();
    phase = view.has("phase") ? view.at("phase").as_number() : 0.0;
  } else {
    view.fail("expected a number or {magnitude, phase}");
  }
  if (!(magnitude > 0.0) || !std::isfinite(magnitude))
    view.fail("magnitude must be positive and finite");
  if (!std::isfinite(phase)) view.fail("phase must be finite");
  return std::polar(magnitude, phase);
}

std::vector<int> parse_photon_numbers(const ConfigView& view) {
  const std::vector<int> numbers = view.as_int_list();
  for (int n : numbers)
    if (n < 0) view.fail("photon numbers must be >= 0");
  for (size_t a = 0; a < numbers.size(); ++a)
    for (size_t b = a + 1; b < numbers.size(); ++b)
      if (numbers[a] == numbers[b]) view.fail("photon numbers must be distinct");
  return numbers;
}

Vector resolve_input(const LatticeSpec& spec, const ConfigView& input, Complex alpha) {
  const std::string type = input.at("type").as_string();
  if (type == "exceptional-mode") {
    const double gamma_c = input.at("gamma_c").as_number();
    return exceptional_mode(spec, gamma_c, alpha);
  }
  if (type == "mode") {
    const int index = input.at("index").as_int();
    if (index < 1 || index > spec.modes)
      input.at("index").fail("guide index must be in [1, modes]");
    Vector shape = Vector::Zero(spec.modes);
    shape[index - 1] = alpha;
    return shape;
  }
  if (type == "amplitudes") {
    const std::vector<double> re = input.at("re").as_number_list();
    std::vector<double> im(re.size(), 0.0);
    if (input.has("im")) im = input.at("im").as_number_list();
    if (re.size() != static_cast<size_t>(spec.modes) || im.size() != re.size())
      input.fail("re/im must each list one amplitude per guide");
    Vector shape(spec.modes);
    for (int m = 0; m < spec.modes; ++m) shape[m] = Complex(re[m], im[m]);
    const double norm = shape.norm();
    if (norm == 0.0) input.fail("amplitude shape must be non-zero");
    return alpha * shape / norm;
  }
  input.at("type").fail("expected \"exceptional-mode\", \"mode\", or \"amplitudes\"");
}

}  // namespace epsim::cli
