#pragma once

#include <vector>

#include "epsim/fock.hpp"
#include "epsim/lattice.hpp"
#include "epsim/types.hpp"

namespace epsim {

// Norm of the difference between a and b after unit normalization and
// optimal global-phase alignment; 0 when the states match up to a factor.
double phase_aligned_residual(const Vector& a, const Vector& b);

// alpha times the unit coalescent right eigenvector of the lattice at the
// critical loss rate gamma_c, phase-fixed (first non-negligible entry
// real-positive).  The vector is extracted from the null space of
// H - lambda_c I rather than from raw eigenvectors, which lose half the
// working precision at a defective point.  Throws ValidationError when
// gamma_c is not critical or no unique coalescent direction exists.
Vector exceptional_mode(const LatticeSpec& spec, double gamma_c, Complex alpha);

// Coherent amplitudes evolve by plain matrix action.
Vector evolve_amplitudes(const Matrix& u, const Vector& amplitudes);

// Projection of a product coherent state onto the N-photon sector:
// coeff(n) = exp(-sum |a_m|^2 / 2) * prod a_m^{n_m} / sqrt(n_m!).
Vector project_to_fock(const Vector& amplitudes, const FockBasis& basis);

// Renormalized |c|^2; throws UnderflowError when the sector norm falls
// below the representable threshold.
inline constexpr double kPostselectUnderflow = 1e-150;
RealVector postselect(const Vector& coefficients);

struct PostselectedEvolution {
  Vector coefficients;
  RealVector probabilities;
};

// Evolves N-photon coefficients with U(z) = exp(-iz h_lifted), then
// post-selects.
PostselectedEvolution evolve_postselected(const Matrix& h_lifted,
                                          const Vector& coefficients, double z);

// Poisson distribution of the total photon number of a product coherent
// state, truncated at n_max (default ceil(nbar + 10 sqrt(nbar))).
struct PhotonDistribution {
  RealVector probabilities;  // index = photon number, 0..n_max
  double tail_mass = 0.0;    // probability mass beyond n_max
};
PhotonDistribution total_photon_distribution(const Vector& amplitudes, int n_max = -1);

// Expected photons in the listed modes under a basis-indexed distribution.
double mean_photons_in(const std::vector<int>& modes, const FockBasis& basis,
                       const RealVector& probabilities);

// Lossless preparation recipe: launch `input` into the lattice with all
// losses off and propagate for z_star to obtain the exceptional mode of the
// lossy lattice (up to global phase).  Supported loss layouts: (1,0) with
// z* = pi/(4 kappa), and (0,1,0) with z* = 3 pi/(4 sqrt(2) kappa); the
// returned recipe is verified internally against the exceptional mode.
struct PrepRecipe {
  Vector input;
  double z_star = 0.0;
  double residual = 0.0;  // phase-aligned distance to the exceptional mode
  Vector target;          // the exceptional mode the recipe lands on
};
PrepRecipe prepare_em_lossless(const LatticeSpec& spec, Complex alpha);

}  // namespace epsim
