#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <epsim/types.hpp>
#include <epsim/version.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

namespace {

using epsim::cli::CommandResult;
using epsim::cli::ConfigView;
using epsim::cli::json;

using CommandFn = std::function<CommandResult(const ConfigView&, const std::string&)>;

const std::map<std::string, CommandFn>& command_table() {
  static const std::map<std::string, CommandFn> table = {
      {"spectrum", epsim::cli::cmd_spectrum},
      {"evolve", epsim::cli::cmd_evolve},
      {"postselect", epsim::cli::cmd_postselect},
      {"sense", epsim::cli::cmd_sense},
      {"fock-graph", epsim::cli::cmd_fock_graph},
      {"prep-check", epsim::cli::cmd_prep_check},
  };
  return table;
}

int run(const std::string& command, const std::string& config_path,
        const std::string& out_dir, const std::vector<std::string>& overrides) {
  json config = epsim::cli::load_config(config_path);

  json override_echo = json::array();
  for (const std::string& spec : overrides) {
    const auto [key, value] = epsim::cli::apply_override(config, spec);
    override_echo.push_back(json{{"key", key}, {"value", value}});
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());

  const ConfigView view(config, "");
  const CommandResult result = command_table().at(command)(view, out_dir);

  json meta;
  meta["command"] = command;
  meta["config"] = config;
  meta["overrides"] = override_echo;
  meta["tool"] = json{{"name", "epsim"},
                      {"version", epsim::kVersion},
                      {"convention", epsim::kConvention}};
  meta["outputs"] = result.outputs;
  for (const auto& [key, value] : result.extra.items()) meta[key] = value;

  const std::string meta_name = command + ".meta.json";
  epsim::cli::write_json(out_dir + "/" + meta_name, meta);

  for (const std::string& name : result.outputs)
    std::cout << "wrote " << out_dir << "/" << name << "\n";
  std::cout << "wrote " << out_dir << "/" << meta_name << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "epsim: exceptional-point physics of lossy coupled-waveguide lattices"};
  app.set_version_flag("--version", epsim::kVersion);

  std::string command, config_path, out_dir = "out";
  std::vector<std::string> overrides;

  std::vector<std::string> names;
  for (const auto& [name, fn] : command_table()) names.push_back(name);
  app.add_option("command", command, "one of: spectrum, evolve, postselect, sense, fock-graph, prep-check")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (created if missing)")
      ->capture_default_str();
  app.add_option("--override", overrides,
                 "config override as dotted.path=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(command, config_path, out_dir, overrides);
  } catch (const epsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const epsim::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const epsim::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
