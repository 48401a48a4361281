#include "epsim/lattice.hpp"

#include <cmath>

namespace epsim {

void LatticeSpec::validate() const {
  if (modes < 2) throw ValidationError("lattice: modes must be >= 2");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ValidationError("lattice: kappa must be positive and finite");
  if (!std::isfinite(beta)) throw ValidationError("lattice: beta must be finite");
  if (static_cast<int>(loss.size()) != modes)
    throw ValidationError("lattice: loss multiplier list must have one entry per mode");
  for (double g : loss)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw ValidationError("lattice: loss multipliers must be finite and >= 0");
  if (boundary == Boundary::Periodic && modes < 3)
    throw ValidationError("lattice: periodic boundary needs modes >= 3");
}

Matrix build_hamiltonian(const LatticeSpec& spec, double gamma) {
  spec.validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("build_hamiltonian: gamma must be finite and >= 0");

  const int m = spec.modes;
  Matrix h = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    h(i, i) = Complex(spec.beta, -spec.loss[i] * gamma);
    if (i + 1 < m) {
      h(i, i + 1) = spec.kappa;
      h(i + 1, i) = spec.kappa;
    }
  }
  if (spec.boundary == Boundary::Periodic) {
    h(0, m - 1) = spec.kappa;
    h(m - 1, 0) = spec.kappa;
  }
  return h;
}

Matrix closed_form_critical(double kappa, double z) {
  if (!(kappa > 0.0)) throw ValidationError("closed_form_critical: kappa must be > 0");
  if (!(z >= 0.0)) throw ValidationError("closed_form_critical: z must be >= 0");
  const double damp = std::exp(-kappa * z);  // Gamma = 2 kappa
  Matrix u(2, 2);
  u(0, 0) = damp * (1.0 - kappa * z);
  u(0, 1) = damp * Complex(0.0, -kappa * z);
  u(1, 0) = u(0, 1);
  u(1, 1) = damp * (1.0 + kappa * z);
  return u;
}

Matrix closed_form_supercritical(double kappa, double gamma, double z) {
  if (!(kappa > 0.0)) throw ValidationError("closed_form_supercritical: kappa must be > 0");
  if (!(gamma > 2.0 * kappa))
    throw ValidationError("closed_form_supercritical: requires gamma > 2*kappa");
  if (!(z >= 0.0)) throw ValidationError("closed_form_supercritical: z must be >= 0");
  const double theta = std::sqrt(gamma * gamma - 4.0 * kappa * kappa) / 2.0;
  const double damp = std::exp(-gamma * z / 2.0);
  const double ch = std::cosh(theta * z);
  const double sh = std::sinh(theta * z) / (2.0 * theta);
  Matrix u(2, 2);
  u(0, 0) = damp * (ch - gamma * sh);
  u(0, 1) = damp * Complex(0.0, -2.0 * kappa * sh);
  u(1, 0) = u(0, 1);
  u(1, 1) = damp * (ch + gamma * sh);
  return u;
}

}  // namespace epsim
