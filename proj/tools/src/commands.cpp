#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <epsim/coherent.hpp>
#include <epsim/ep.hpp>
#include <epsim/fock.hpp>
#include <epsim/lattice.hpp>
#include <epsim/spectral.hpp>

#include "table.hpp"

namespace epsim::cli {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

double require_gamma(const ConfigView& view) {
  const double gamma = require_single(view);
  if (gamma < 0.0) view.fail("loss rate must be >= 0");
  return gamma;
}

GridSpec require_gamma_range(const ConfigView& view) {
  GridSpec grid = require_range(view);
  if (grid.min < 0.0) view.fail("loss rates must be >= 0");
  return grid;
}

Complex alpha_or(const ConfigView& config, double default_magnitude) {
  if (auto alpha = config.maybe("alpha")) return parse_alpha(*alpha);
  return Complex(default_magnitude, 0.0);
}

Vector require_input(const ConfigView& config, const LatticeSpec& spec,
                     Complex alpha) {
  return resolve_input(spec, config.at("input"), alpha);
}

json amplitude_echo(const Vector& amplitudes) {
  json re = json::array(), im = json::array();
  for (int m = 0; m < amplitudes.size(); ++m) {
    re.push_back(amplitudes[m].real());
    im.push_back(amplitudes[m].imag());
  }
  return json{{"re", re}, {"im", im}};
}

json ep_record_json(const EPRecord& rec) {
  return json{{"gamma_c", rec.gamma_c},
              {"coalescing_count", rec.coalescing_count},
              {"independent_vectors", rec.independent_vectors},
              {"order_estimate", rec.order_estimate},
              {"scaling_exponent", rec.scaling_exponent},
              {"fit_residual", rec.fit_residual},
              {"eigenvector_overlap", rec.eigenvector_overlap},
              {"classified", rec.classified},
              {"branch_ids", rec.coalescing_branch_ids}};
}

}  // namespace

CommandResult cmd_spectrum(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  const GridSpec grid = require_gamma_range(config.at("gamma"));

  int lift_photons = 0;
  double refinement_tol = 1e-9;
  if (auto options = config.maybe("options")) {
    if (auto lift = options->maybe("lift_photons")) {
      lift_photons = lift->as_int();
      if (lift_photons < 0) lift->fail("lift_photons must be >= 0");
    }
    if (auto tol = options->maybe("refinement_tol")) {
      refinement_tol = tol->as_number();
      if (!(refinement_tol > 0.0)) tol->fail("refinement_tol must be > 0");
    }
  }

  Table table;
  json ep_list = json::array();

  if (grid.min == grid.max) {
    // Single loss rate: report the sorted spectrum, no coalescence analysis.
    Matrix h = build_hamiltonian(spec, grid.min);
    if (lift_photons > 0)
      h = lift_hamiltonian(h, FockBasis::enumerate(lift_photons, spec.modes));
    const Eigensystem eig = eigendecompose(h);
    table.columns.push_back("gamma");
    for (int b = 0; b < eig.values.size(); ++b) {
      table.columns.push_back("branch_" + std::to_string(b + 1) + "_re");
      table.columns.push_back("branch_" + std::to_string(b + 1) + "_im");
    }
    std::vector<std::string> row{format_number(grid.min)};
    for (int b = 0; b < eig.values.size(); ++b) {
      row.push_back(format_number(eig.values[b].real()));
      row.push_back(format_number(eig.values[b].imag()));
    }
    table.add_row(std::move(row));
  } else {
    const SpectralSweep sw =
        lift_photons > 0
            ? sweep(spec, FockBasis::enumerate(lift_photons, spec.modes), grid.min,
                    grid.max, grid.steps)
            : sweep(spec, grid.min, grid.max, grid.steps);
    table.columns.push_back("gamma");
    for (int b = 0; b < sw.branch_count(); ++b) {
      table.columns.push_back("branch_" + std::to_string(b + 1) + "_re");
      table.columns.push_back("branch_" + std::to_string(b + 1) + "_im");
    }
    for (int t = 0; t < sw.grid_size(); ++t) {
      std::vector<std::string> row{format_number(sw.gamma_grid[t])};
      for (int b = 0; b < sw.branch_count(); ++b) {
        row.push_back(format_number(sw.branches(b, t).real()));
        row.push_back(format_number(sw.branches(b, t).imag()));
      }
      table.add_row(std::move(row));
    }
    for (const EPRecord& rec : find_eps(sw, refinement_tol))
      ep_list.push_back(ep_record_json(rec));
  }

  write_csv(join(out_dir, "spectrum.csv"), table);

  CommandResult result;
  result.extra["exceptional_points"] = ep_list;
  result.extra["lift_photons"] = lift_photons;
  result.outputs = {"spectrum.csv"};
  return result;
}

CommandResult cmd_evolve(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  const double gamma = require_gamma(config.at("gamma"));
  const GridSpec zgrid = require_range(config.at("z"));
  const Complex alpha = alpha_or(config, 1.0);
  const Vector launch = require_input(config, spec, alpha);

  std::vector<int> photon_numbers;
  if (auto numbers = config.maybe("photon_numbers"))
    photon_numbers = parse_photon_numbers(*numbers);

  Table table;
  table.columns.push_back("z");
  for (int m = 0; m < spec.modes; ++m)
    table.columns.push_back("intensity_" + std::to_string(m + 1));
  table.columns.push_back("total");
  table.columns.push_back("mean_photons");
  for (int n : photon_numbers)
    table.columns.push_back("poisson_" + std::to_string(n));

  const Matrix h = build_hamiltonian(spec, gamma);
  const double input_intensity = launch.squaredNorm();
  const int dist_max =
      photon_numbers.empty()
          ? -1
          : *std::max_element(photon_numbers.begin(), photon_numbers.end());

  for (double z : zgrid.values()) {
    const Vector a = evolve_amplitudes(propagator(h, z), launch);
    std::vector<std::string> row{format_number(z)};
    for (int m = 0; m < spec.modes; ++m)
      row.push_back(format_number(std::norm(a[m])));
    row.push_back(format_number(a.squaredNorm() / input_intensity));
    row.push_back(format_number(a.squaredNorm()));
    if (!photon_numbers.empty()) {
      const PhotonDistribution dist = total_photon_distribution(a, dist_max);
      for (int n : photon_numbers)
        row.push_back(format_number(dist.probabilities[n]));
    }
    table.add_row(std::move(row));
  }

  write_csv(join(out_dir, "evolve.csv"), table);

  CommandResult result;
  result.extra["launch"] = amplitude_echo(launch);
  result.extra["input_intensity"] = input_intensity;
  result.outputs = {"evolve.csv"};
  return result;
}

CommandResult cmd_postselect(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  const double gamma = require_gamma(config.at("gamma"));
  const GridSpec zgrid = require_range(config.at("z"));
  const Complex alpha = alpha_or(config, 1.0);
  const Vector launch = require_input(config, spec, alpha);
  const std::vector<int> photon_numbers =
      parse_photon_numbers(config.at("photon_numbers"));
  if (photon_numbers.empty())
    config.at("photon_numbers").fail("expected at least one photon number");

  // Propagate the coherent amplitudes once per z; every photon sector is a
  // projection of the same evolved product state.
  const Matrix h = build_hamiltonian(spec, gamma);
  std::vector<Vector> evolved;
  for (double z : zgrid.values())
    evolved.push_back(evolve_amplitudes(propagator(h, z), launch));

  CommandResult result;
  result.extra["launch"] = amplitude_echo(launch);
  json tables = json::array();

  for (int n : photon_numbers) {
    const FockBasis basis = FockBasis::enumerate(n, spec.modes);
    Table table;
    table.columns.push_back("z");
    for (int k = 0; k < basis.dimension(); ++k)
      table.columns.push_back("p_" + basis.label(k));
    table.columns.push_back("status");

    const std::vector<double> zs = zgrid.values();
    for (size_t t = 0; t < zs.size(); ++t) {
      std::vector<std::string> row{format_number(zs[t])};
      try {
        const RealVector probs = postselect(project_to_fock(evolved[t], basis));
        for (int k = 0; k < basis.dimension(); ++k)
          row.push_back(format_number(probs[k]));
        row.push_back("ok");
      } catch (const UnderflowError&) {
        for (int k = 0; k < basis.dimension(); ++k) row.push_back("nan");
        row.push_back("underflow");
      }
      table.add_row(std::move(row));
    }

    const std::string name = photon_numbers.size() == 1
                                 ? "postselect.csv"
                                 : "postselect_N" + std::to_string(n) + ".csv";
    write_csv(join(out_dir, name), table);
    result.outputs.push_back(name);
    tables.push_back(json{
        {"photons", n}, {"file", name}, {"dimension", basis.dimension()}});
  }

  result.extra["tables"] = tables;
  return result;
}

CommandResult cmd_sense(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  const GridSpec grid = require_gamma_range(config.at("gamma"));
  const double z_f =
      config.has("z") ? require_single(config.at("z")) : 1.5;
  const Complex alpha = alpha_or(config, std::sqrt(20.0));

  const ConfigView options = config.at("options");
  const double working_point = options.at("working_point").as_number();
  if (working_point < 0.0)
    options.at("working_point").fail("loss rate must be >= 0");
  double delta = 1e-3;
  if (auto d = options.maybe("delta")) {
    delta = d->as_number();
    if (!(delta > 0.0)) d->fail("delta must be > 0");
  }

  // Measured guides default to the loss-free ones.
  std::vector<int> modes;
  if (auto listed = options.maybe("modes")) {
    for (int m : listed->as_int_list()) {
      if (m < 1 || m > spec.modes)
        listed->fail("guide indices must be in [1, modes]");
      modes.push_back(m - 1);
    }
  } else {
    for (int m = 0; m < spec.modes; ++m)
      if (spec.loss[m] == 0.0) modes.push_back(m);
  }
  if (modes.empty())
    options.fail("no loss-free guides to measure; set options.modes");

  std::vector<int> photon_numbers;
  if (auto numbers = config.maybe("photon_numbers")) {
    photon_numbers = parse_photon_numbers(*numbers);
    for (int n : photon_numbers)
      if (n < 1) numbers->fail("post-selected photon numbers must be >= 1");
  }

  const Vector launch = config.has("input")
                            ? require_input(config, spec, alpha)
                            : exceptional_mode(spec, working_point, alpha);

  Table table;
  table.columns.push_back("gamma");
  table.columns.push_back("n_bar");
  for (int n : photon_numbers)
    table.columns.push_back("mean_photons_neutral_N" + std::to_string(n));

  std::vector<FockBasis> bases;
  for (int n : photon_numbers)
    bases.push_back(FockBasis::enumerate(n, spec.modes));

  for (double gamma : grid.values()) {
    const Vector a =
        evolve_amplitudes(propagator(build_hamiltonian(spec, gamma), z_f), launch);
    std::vector<std::string> row{format_number(gamma),
                                 format_number(a.squaredNorm())};
    for (size_t k = 0; k < bases.size(); ++k) {
      try {
        const RealVector probs = postselect(project_to_fock(a, bases[k]));
        row.push_back(format_number(mean_photons_in(modes, bases[k], probs)));
      } catch (const UnderflowError&) {
        row.push_back("nan");
      }
    }
    table.add_row(std::move(row));
  }

  write_csv(join(out_dir, "sense.csv"), table);

  // Finite-difference slopes at the working point: the classical reference
  // and each post-selected scheme.
  SenseConfig sense;
  sense.lattice = spec;
  sense.input = launch;
  sense.z_f = z_f;
  sense.observable = Observable::MeanTotalPhotons;
  const SlopeResult classical = sensitivity_slope(sense, working_point, delta);

  json slopes;
  slopes["working_point"] = working_point;
  slopes["delta"] = delta;
  slopes["classical"] =
      json{{"slope", classical.slope}, {"one_sided", classical.one_sided}};
  json per_n = json::array();
  for (int n : photon_numbers) {
    sense.observable = Observable::MeanPhotonsInModes;
    sense.modes = modes;
    sense.photons = n;
    const SlopeResult r = sensitivity_slope(sense, working_point, delta);
    per_n.push_back(json{{"photons", n},
                         {"slope", r.slope},
                         {"one_sided", r.one_sided},
                         {"slope_per_photon", r.slope / n}});
  }
  slopes["post_selected"] = per_n;

  CommandResult result;
  result.extra["slopes"] = slopes;
  result.extra["launch"] = amplitude_echo(launch);
  result.extra["z"] = z_f;
  json modes_echo = json::array();
  for (int m : modes) modes_echo.push_back(m + 1);
  result.extra["modes"] = modes_echo;
  result.outputs = {"sense.csv"};
  return result;
}

CommandResult cmd_fock_graph(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  const std::vector<int> photon_numbers =
      parse_photon_numbers(config.at("photon_numbers"));
  if (photon_numbers.size() != 1)
    config.at("photon_numbers").fail("expected exactly one photon number");
  const int photons = photon_numbers[0];

  std::uint64_t cap = 1000000;
  if (auto options = config.maybe("options")) {
    if (auto c = options->maybe("dimension_cap")) {
      const int value = c->as_int();
      if (value < 1) c->fail("dimension_cap must be >= 1");
      cap = static_cast<std::uint64_t>(value);
    }
  }

  const FockBasis basis = FockBasis::enumerate(photons, spec.modes, cap);
  const FockGraph graph = export_fock_graph(spec, basis);

  std::ostringstream dot;
  write_dot(graph, basis, dot);
  write_text(join(out_dir, "fock-graph.dot"), dot.str());

  Table table;
  table.columns = {"node", "label", "loss"};
  for (int k = 0; k < basis.dimension(); ++k)
    table.add_row({std::to_string(k), basis.label(k),
                   format_number(graph.nodes[k].loss)});
  write_csv(join(out_dir, "fock-graph.csv"), table);

  CommandResult result;
  result.extra["graph"] = json{{"photons", photons},
                               {"modes", spec.modes},
                               {"nodes", graph.nodes.size()},
                               {"edges", graph.edges.size()}};
  result.outputs = {"fock-graph.csv", "fock-graph.dot"};
  return result;
}

CommandResult cmd_prep_check(const ConfigView& config, const std::string& out_dir) {
  const LatticeSpec spec = parse_lattice(config.at("lattice"));
  if (config.has("gamma") && require_single(config.at("gamma")) != 0.0)
    config.at("gamma").fail("the preparation stage is lossless; gamma must be 0");
  const Complex alpha = alpha_or(config, 1.0);

  const PrepRecipe recipe = prepare_em_lossless(spec, alpha);

  Table table;
  table.columns = {"z_star", "residual"};
  for (int m = 0; m < spec.modes; ++m) {
    table.columns.push_back("input_" + std::to_string(m + 1) + "_re");
    table.columns.push_back("input_" + std::to_string(m + 1) + "_im");
  }
  for (int m = 0; m < spec.modes; ++m) {
    table.columns.push_back("target_" + std::to_string(m + 1) + "_re");
    table.columns.push_back("target_" + std::to_string(m + 1) + "_im");
  }
  std::vector<std::string> row{format_number(recipe.z_star),
                               format_number(recipe.residual)};
  for (int m = 0; m < spec.modes; ++m) {
    row.push_back(format_number(recipe.input[m].real()));
    row.push_back(format_number(recipe.input[m].imag()));
  }
  for (int m = 0; m < spec.modes; ++m) {
    row.push_back(format_number(recipe.target[m].real()));
    row.push_back(format_number(recipe.target[m].imag()));
  }
  table.add_row(std::move(row));

  write_csv(join(out_dir, "prep-check.csv"), table);

  CommandResult result;
  result.extra["preparation"] = json{{"z_star", recipe.z_star},
                                     {"residual", recipe.residual},
                                     {"input", amplitude_echo(recipe.input)},
                                     {"target", amplitude_echo(recipe.target)}};
  result.outputs = {"prep-check.csv"};
  return result;
}

}  // namespace epsim::cli
