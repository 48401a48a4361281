#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "epsim/fock.hpp"
#include "epsim/lattice.hpp"
#include "epsim/types.hpp"

namespace epsim {

using HamiltonianBuilder = std::function<Matrix(double)>;

// Eigenvalue branches tracked continuously across an increasing loss-rate
// grid. Branch matching between consecutive grid points uses optimal
// bipartite assignment on eigenvalue positions, with ties broken by
// velocity extrapolation from the previous step.
struct SpectralSweep {
  HamiltonianBuilder builder;   // gamma -> Hamiltonian; retained for refinement
  RealVector gamma_grid;        // strictly increasing
  Matrix branches;              // branches(b, t) = eigenvalue of branch b at gamma_grid[t]
  std::vector<bool> defective;  // per grid point: eigenvector matrix ill-conditioned

  int branch_count() const { return static_cast<int>(branches.rows()); }
  int grid_size() const { return static_cast<int>(branches.cols()); }
};

SpectralSweep sweep(HamiltonianBuilder builder, double gamma_min, double gamma_max,
                    int steps);
SpectralSweep sweep(const LatticeSpec& spec, double gamma_min, double gamma_max,
                    int steps);
// Sweep of the N-photon lifted Hamiltonian of `spec` over the same grid.
SpectralSweep sweep(const LatticeSpec& spec, const FockBasis& basis, double gamma_min,
                    double gamma_max, int steps);

// A confirmed exceptional point: a loss rate where eigenvalues coalesce and
// the eigenvector bundle of the coalescing group loses rank.
//
// `order_estimate` comes from the degeneracy structure
// (coalescing_count / independent_vectors), which is reliable even when the
// eigenvalue-splitting exponent cannot be fitted cleanly. `scaling_exponent`
// is the fitted slope of log(gap) vs log(epsilon) near gamma_c; `classified`
// is set only when that fit is tight and consistent with 1/order_estimate.
// High-order points reached through a one-parameter loss sweep can split with
// an exponent different from 1/order (e.g. sqrt-like splitting of a lifted
// multiphoton point); such records are reported with classified = false
// rather than dropped.
struct EPRecord {
  double gamma_c = 0.0;
  std::vector<int> coalescing_branch_ids;  // sorted branch indices of the sweep
  int coalescing_count = 0;                // eigenvalues merging at gamma_c
  int independent_vectors = 0;             // dimension of the surviving eigenspace
  int order_estimate = 0;                  // coalescing_count / independent_vectors
  double scaling_exponent = 0.0;           // fitted splitting exponent
  double fit_residual = 0.0;               // max |log-gap residual| of the fit
  double eigenvector_overlap = 0.0;        // max pairwise |<v_i, v_j>| in the group
  bool classified = false;                 // exponent trustworthy and = 1/order
};

struct FindEpsOptions {
  // Eigenvalue cluster linkage, scaled by (1 + max |eigenvalue|).
  double cluster_scale = 0.02;
  // Pair gaps below this times the branch scale are exact degeneracies and
  // are ignored (symmetry-protected doublets would otherwise mask minima).
  double degenerate_floor = 1e-10;
  // Singular values of (H - mean I) at most this times the eigenvalue scale
  // count toward the eigenspace of a coalescing cluster. A genuine
  // exceptional point has eigenspace dimension >= 1 but below the cluster
  // size; a symmetry-protected semisimple degeneracy has the full size and
  // is rejected.
  double defect_tol = 1e-6;
  // Half-width of the second refinement stage (minimizing the defect
  // singular value), scaled by max(1, gamma_c). This stage pins high-order
  // points whose eigenvalue gaps are too noise-dominated for gap
  // minimization alone.
  double defect_refine_window = 1e-3;
  // Splitting-exponent fit window, scaled by max(1, gamma_c), and its size.
  double fit_eps_min = 1e-6;
  double fit_eps_max = 1e-3;
  int fit_points = 8;
  // Classification gates: fit quality and exponent-vs-order consistency.
  double fit_residual_max = 0.15;
  double classify_tol = 0.02;
};

// Locates exceptional points of a sweep: local minima of pairwise branch
// gaps are refined by golden-section search on the spectral gap function to
// within `refinement_tol` in gamma, then confirmed by eigenvalue clustering,
// eigenvector rank deficiency, and a defectiveness check. Records are
// returned sorted by gamma_c.
std::vector<EPRecord> find_eps(const SpectralSweep& sweep, double refinement_tol = 1e-9,
                               const FindEpsOptions& options = {});

// True when the lattice Hamiltonian at this loss rate is defective: some
// eigenvalue cluster has fewer independent eigenvectors than members.
bool is_critical_loss(const LatticeSpec& spec, double gamma,
                      const FindEpsOptions& options = {});

// Eigenvalue splitting of the two-mode lattice (losses on the first guide)
// just past its critical point: the spectrum of H at Gamma = 2*kappa + eps,
// returned as the difference of the two eigenvalues ordered by imaginary
// part, which equals 2i*sqrt(kappa*eps) to first order in eps.
Complex ep_splitting(double kappa, double eps);

// Number of loss rates in the N-photon spectrum of an M-mode chain where
// eigenvalue branches meet: C(N + M - 2, N).
std::uint64_t count_multifurcation_points(int photons, int modes);

struct BranchingCount {
  std::uint64_t points = 0;
  int branches = 0;
};

// Of those, the number where exactly `ep_photons` photons occupy the
// critical pair, each showing ep_photons + 1 meeting branches:
// C(N - ep_photons + M - 3, N - ep_photons) for M >= 3. For M = 2 the
// formula degenerates; the two-mode chain has the single point with all
// photons on the critical pair (ep_photons = N).
BranchingCount count_points_with_branching(int photons, int ep_photons, int modes);

enum class Observable {
  MeanTotalPhotons,    // ||a(z_f)||^2 of the evolved coherent amplitudes
  MeanPhotonsInModes,  // post-selected mean occupation of `modes` at fixed N
};

struct SenseConfig {
  LatticeSpec lattice;
  Vector input;  // launched coherent amplitudes (e.g. an exceptional mode)
  double z_f = 1.5;
  Observable observable = Observable::MeanTotalPhotons;
  std::vector<int> modes;  // measured modes (MeanPhotonsInModes)
  int photons = 0;         // post-selection photon number (MeanPhotonsInModes)
};

// Observable value after propagating the input to z_f at loss rate gamma.
double sense_observable(const SenseConfig& config, double gamma);

struct SlopeResult {
  double slope = 0.0;
  bool one_sided = false;  // forward difference was used (critical point or boundary)
};

// Finite-difference slope of the observable at gamma0 with step delta.
// Central by default; at a critical loss rate of the lattice (where the
// observable is not smooth) or when gamma0 - delta < 0, a forward difference
// is used and flagged.
SlopeResult sensitivity_slope(const SenseConfig& config, double gamma0, double delta);

}  // namespace epsim
