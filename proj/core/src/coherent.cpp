#include "epsim/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "epsim/spectral.hpp"

namespace epsim {

double phase_aligned_residual(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw ValidationError("phase_aligned_residual: size mismatch");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return std::sqrt(2.0);
  const Vector ua = a / na, ub = b / nb;
  const Complex overlap = ua.dot(ub);  // conjugate-linear in ua
  if (std::abs(overlap) == 0.0) return std::sqrt(2.0);
  const Complex phase = overlap / std::abs(overlap);
  return (ua * phase - ub).norm();
}

Vector exceptional_mode(const LatticeSpec& spec, double gamma_c, Complex alpha) {
  const Matrix h = build_hamiltonian(spec, gamma_c);
  const int n = static_cast<int>(h.rows());
  const Eigensystem eig = eigendecompose(h);
  const double scale = 1.0 + eig.values.cwiseAbs().maxCoeff();
  const double defect_tol = 1e-6 * scale;

  // A coalescent cluster is defective: the eigenspace at its mean value is
  // smaller than its multiplicity. A semisimple degeneracy (full eigenspace)
  // is not an exceptional point.
  Vector mode;
  bool found = false;
  for (const auto& cluster : cluster_eigenvalues(eig.values, 1e-4 * scale)) {
    const int g = static_cast<int>(cluster.size());
    if (g < 2) continue;

    Complex center = 0.0;
    for (int k : cluster) center += eig.values[k];
    center /= static_cast<double>(g);

    Eigen::JacobiSVD<Matrix> svd(h - center * Matrix::Identity(n, n),
                                 Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int eigenspace = 0;
    for (int k = 0; k < n; ++k)
      if (sv[k] <= defect_tol) ++eigenspace;
    if (eigenspace < 1 || eigenspace >= g) continue;
    if (eigenspace > 1)
      throw ValidationError(
          "exceptional_mode: coalescent direction is not unique at this gamma");
    if (found)
      throw ValidationError(
          "exceptional_mode: multiple coalescent clusters at this gamma");
    // Null vector of (h - center I), accurate to machine precision here.
    mode = svd.matrixV().col(n - 1);
    found = true;
  }
  if (!found)
    throw ValidationError(
        "exceptional_mode: gamma_c is not a critical loss rate of this lattice");

  int lead = 0;
  while (lead < mode.size() - 1 && std::abs(mode[lead]) <= 1e-8) ++lead;
  mode *= std::conj(mode[lead]) / std::abs(mode[lead]);
  return alpha * mode;
}

Vector evolve_amplitudes(const Matrix& u, const Vector& amplitudes) {
  if (u.cols() != amplitudes.size())
    throw ValidationError("evolve_amplitudes: dimension mismatch");
  return u * amplitudes;
}

Vector project_to_fock(const Vector& amplitudes, const FockBasis& basis) {
  if (amplitudes.size() != basis.modes())
    throw ValidationError("project_to_fock: amplitude count mismatch with basis");
  if (!amplitudes.allFinite())
    throw NumericError("project_to_fock: non-finite amplitudes");

  const double prefactor = std::exp(-amplitudes.squaredNorm() / 2.0);
  const int dim = basis.dimension();
  Vector coeffs(dim);
  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.occupation(s);
    Complex c = prefactor;
    for (int m = 0; m < basis.modes(); ++m) {
      for (int k = 0; k < occ[m]; ++k)
        c *= amplitudes[m] / std::sqrt(static_cast<double>(k + 1));
    }
    coeffs[s] = c;
  }
  return coeffs;
}

RealVector postselect(const Vector& coefficients) {
  if (!coefficients.allFinite())
    throw NumericError("postselect: non-finite coefficients");
  const double norm2 = coefficients.squaredNorm();
  if (norm2 < kPostselectUnderflow)
    throw UnderflowError("postselect: sector weight underflow, post-selection impossible");
  return coefficients.cwiseAbs2() / norm2;
}

PostselectedEvolution evolve_postselected(const Matrix& h_lifted,
                                          const Vector& coefficients, double z) {
  if (h_lifted.rows() != coefficients.size())
    throw ValidationError("evolve_postselected: dimension mismatch");
  PostselectedEvolution out;
  out.coefficients = propagator(h_lifted, z) * coefficients;
  out.probabilities = postselect(out.coefficients);
  return out;
}

PhotonDistribution total_photon_distribution(const Vector& amplitudes, int n_max) {
  if (!amplitudes.allFinite())
    throw NumericError("total_photon_distribution: non-finite amplitudes");
  const double nbar = amplitudes.squaredNorm();
  if (n_max < 0)
    n_max = static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar)));

  PhotonDistribution dist;
  dist.probabilities.resize(n_max + 1);
  double p = std::exp(-nbar);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) p *= nbar / n;
    dist.probabilities[n] = p;
    total += p;
  }
  dist.tail_mass = std::max(0.0, 1.0 - total);
  return dist;
}

double mean_photons_in(const std::vector<int>& modes, const FockBasis& basis,
                       const RealVector& probabilities) {
  if (probabilities.size() != basis.dimension())
    throw ValidationError("mean_photons_in: distribution size mismatch with basis");
  if (modes.empty())
    throw ValidationError("mean_photons_in: at least one mode must be measured");
  for (int m : modes)
    if (m < 0 || m >= basis.modes())
      throw ValidationError("mean_photons_in: mode index out of range");
  double mean = 0.0;
  for (int s = 0; s < basis.dimension(); ++s) {
    const auto& occ = basis.occupation(s);
    int count = 0;
    for (int m : modes) count += occ[m];
    mean += probabilities[s] * count;
  }
  return mean;
}

PrepRecipe prepare_em_lossless(const LatticeSpec& spec, Complex alpha) {
  spec.validate();
  if (std::abs(alpha) == 0.0)
    throw ValidationError("prepare_em_lossless: alpha must be non-zero");

  const std::vector<double> two_mode{1.0, 0.0};
  const std::vector<double> trimer{0.0, 1.0, 0.0};

  PrepRecipe recipe;
  double gamma_c = 0.0;
  if (spec.modes == 2 && spec.loss == two_mode && spec.boundary == Boundary::Open) {
    recipe.input = Vector::Zero(2);
    recipe.input[1] = alpha;
    recipe.z_star = std::numbers::pi / (4.0 * spec.kappa);
    gamma_c = 2.0 * spec.kappa;
  } else if (spec.modes == 3 && spec.loss == trimer && spec.boundary == Boundary::Open) {
    recipe.input = Vector::Zero(3);
    recipe.input[1] = alpha;
    recipe.z_star = 3.0 * std::numbers::pi / (4.0 * std::sqrt(2.0) * spec.kappa);
    gamma_c = 2.0 * std::sqrt(2.0) * spec.kappa;
  } else {
    throw ValidationError(
        "prepare_em_lossless: preparation recipe not defined for this geometry");
  }

  const Matrix u = propagator(build_hamiltonian(spec, 0.0), recipe.z_star);
  const Vector prepared = evolve_amplitudes(u, recipe.input);
  recipe.target = exceptional_mode(spec, gamma_c, alpha);
  recipe.residual = phase_aligned_residual(prepared, recipe.target);
  if (recipe.residual > 1e-8)
    throw NumericError("prepare_em_lossless: recipe verification failed");
  return recipe;
}

}  // namespace epsim
