#pragma once

#include <vector>

#include "epsim/types.hpp"

namespace epsim {

enum class Boundary { Open, Periodic };

// Geometry and loss layout of a coupled-waveguide chain or ring.
// loss holds the per-guide multipliers g_m >= 0; the actual loss rate of
// guide m is g_m * Gamma with Gamma supplied per evaluation.
struct LatticeSpec {
  int modes = 0;
  double kappa = 0.0;
  double beta = 0.0;
  std::vector<double> loss;
  Boundary boundary = Boundary::Open;

  // Throws ValidationError on malformed specs.
  void validate() const;
};

// Single-photon Hamiltonian: tridiagonal coupling kappa (plus ring corners),
// diagonal beta - i g_m Gamma.  U(z) = exp(-izH) then damps lossy guides.
Matrix build_hamiltonian(const LatticeSpec& spec, double gamma);

// Two-guide closed forms for the semi-lossy coupler, g = (1, 0).
// At the critical loss Gamma = 2*kappa:
//   U(z) = exp(-Gamma z/2) [[1 - kappa z, -i kappa z], [-i kappa z, 1 + kappa z]]
// For Gamma > 2*kappa, with theta = sqrt(Gamma^2 - 4 kappa^2)/2:
//   U(z) = exp(-Gamma z/2) (cosh(theta z) I
//          + sinh(theta z)/(2 theta) [[-Gamma, -2i kappa], [-2i kappa, Gamma]])
// Both agree entrywise with propagator(build_hamiltonian(...), z).
Matrix closed_form_critical(double kappa, double z);
Matrix closed_form_supercritical(double kappa, double gamma, double z);

}  // namespace epsim
