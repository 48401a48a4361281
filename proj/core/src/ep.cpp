#include "epsim/ep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "epsim/assignment.hpp"
#include "epsim/coherent.hpp"
#include "epsim/spectral.hpp"

namespace epsim {

namespace {

constexpr double kVelocityTieWeight = 1e-6;

Vector eigenvalues_sorted(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw ValidationError("sweep: builder must produce square non-empty matrices");
  if (!h.allFinite())
    throw NumericError("sweep: builder produced non-finite matrix entries");
  Eigen::ComplexEigenSolver<Matrix> solver(h, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("sweep: eigensolver failed to converge");
  Vector v = solver.eigenvalues();
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

// Derivative-free minimization of f over [lo, hi] to an interval of width tol.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Number of singular values of (h - center I) at or below tol_abs: the
// dimension of the numerical eigenspace at `center`.
int null_dimension(const Matrix& h, Complex center, double tol_abs) {
  Eigen::JacobiSVD<Matrix> svd(h - center * Matrix::Identity(h.rows(), h.cols()));
  const auto& sv = svd.singularValues();
  int dim = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] <= tol_abs) ++dim;
  return dim;
}

struct LinearFit {
  double slope = 0.0;
  double max_residual = std::numeric_limits<double>::infinity();
  bool valid = false;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const int n = static_cast<int>(x.size());
  if (n < 3) return fit;
  double xm = 0.0, ym = 0.0;
  for (int k = 0; k < n; ++k) {
    xm += x[k];
    ym += y[k];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (x[k] - xm) * (x[k] - xm);
    sxy += (x[k] - xm) * (y[k] - ym);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.max_residual = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = y[k] - (ym + fit.slope * (x[k] - xm));
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.valid = std::isfinite(fit.slope) && std::isfinite(fit.max_residual);
  return fit;
}

}  // namespace

SpectralSweep sweep(HamiltonianBuilder builder, double gamma_min, double gamma_max,
                    int steps) {
  if (!builder) throw ValidationError("sweep: a Hamiltonian builder is required");
  if (!(gamma_min < gamma_max))
    throw ValidationError("sweep: gamma_min must be less than gamma_max");
  if (steps < 2) throw ValidationError("sweep: steps must be at least 2");

  SpectralSweep out;
  out.builder = std::move(builder);
  out.gamma_grid.resize(steps);
  for (int t = 0; t < steps; ++t)
    out.gamma_grid[t] =
        gamma_min + (gamma_max - gamma_min) * static_cast<double>(t) / (steps - 1);

  int n = 0;
  out.defective.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    const Eigensystem eig = eigendecompose(out.builder(out.gamma_grid[t]));
    if (t == 0) {
      n = static_cast<int>(eig.values.size());
      out.branches.resize(n, steps);
      out.branches.col(0) = eig.values;
    } else {
      if (eig.values.size() != n)
        throw ValidationError("sweep: builder dimension changed across the grid");
      RealMatrix cost(n, n);
      for (int b = 0; b < n; ++b) {
        const Complex prev = out.branches(b, t - 1);
        const Complex pred =
            t >= 2 ? Complex(2.0, 0.0) * prev - out.branches(b, t - 2) : prev;
        for (int k = 0; k < n; ++k) {
          const double base = std::norm(eig.values[k] - prev);
          const double tie = std::norm(eig.values[k] - pred);
          cost(b, k) = base + kVelocityTieWeight * tie;
        }
      }
      const std::vector<int> match = min_cost_assignment(cost);
      for (int b = 0; b < n; ++b) out.branches(b, t) = eig.values[match[b]];
    }
    out.defective.push_back(eig.defective);
  }
  return out;
}

SpectralSweep sweep(const LatticeSpec& spec, double gamma_min, double gamma_max,
                    int steps) {
  spec.validate();
  return sweep([spec](double gamma) { return build_hamiltonian(spec, gamma); },
               gamma_min, gamma_max, steps);
}

SpectralSweep sweep(const LatticeSpec& spec, const FockBasis& basis, double gamma_min,
                    double gamma_max, int steps) {
  spec.validate();
  if (basis.modes() != spec.modes)
    throw ValidationError("sweep: basis mode count does not match the lattice");
  return sweep(
      [spec, basis](double gamma) {
        return lift_hamiltonian(build_hamiltonian(spec, gamma), basis);
      },
      gamma_min, gamma_max, steps);
}

std::vector<EPRecord> find_eps(const SpectralSweep& sw, double refinement_tol,
                               const FindEpsOptions& opt) {
  if (!sw.builder) throw ValidationError("find_eps: sweep carries no builder");
  if (sw.grid_size() < 2 || sw.branch_count() < 2)
    throw ValidationError("find_eps: sweep must have at least 2 grid points and branches");
  if (!(refinement_tol > 0.0) || !std::isfinite(refinement_tol))
    throw ValidationError("find_eps: refinement_tol must be positive and finite");

  const int n = sw.branch_count();
  const int steps = sw.grid_size();
  const double branch_scale = 1.0 + sw.branches.cwiseAbs().maxCoeff();
  const double gap_floor = opt.degenerate_floor * branch_scale;

  // Candidate brackets: local minima of every pairwise branch-gap function.
  // Pairs that are degenerate over the whole grid are symmetry doublets and
  // carry no coalescence information of their own.
  std::vector<std::pair<double, double>> brackets;
  std::vector<double> gaps(steps);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double widest = 0.0;
      for (int t = 0; t < steps; ++t) {
        gaps[t] = std::abs(sw.branches(i, t) - sw.branches(j, t));
        widest = std::max(widest, gaps[t]);
      }
      if (widest < gap_floor) continue;
      for (int t = 0; t < steps; ++t) {
        const bool left_ok = t == 0 || gaps[t] <= gaps[t - 1];
        const bool right_ok = t == steps - 1 || gaps[t] <= gaps[t + 1];
        if (left_ok && right_ok)
          brackets.emplace_back(sw.gamma_grid[std::max(t - 1, 0)],
                                sw.gamma_grid[std::min(t + 1, steps - 1)]);
      }
    }
  }
  std::sort(brackets.begin(), brackets.end());
  brackets.erase(std::unique(brackets.begin(), brackets.end()), brackets.end());

  // Spectral gap function: the smallest pairwise eigenvalue distance above
  // the exact-degeneracy floor.
  auto min_gap = [&](double gamma) {
    const Vector vals = eigenvalues_sorted(sw.builder(gamma));
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vals.size(); ++i)
      for (int j = i + 1; j < vals.size(); ++j) {
        const double g = std::abs(vals[i] - vals[j]);
        if (g > gap_floor) best = std::min(best, g);
      }
    return std::isfinite(best) ? best : 0.0;
  };

  // Stage 1: gap minimization. Accurate for clean low-order points but can
  // wander by the eigenvalue noise radius near high-order coalescences.
  std::vector<double> stage1;
  stage1.reserve(brackets.size());
  for (const auto& [lo, hi] : brackets)
    stage1.push_back(golden_min(min_gap, lo, hi, refinement_tol));
  std::sort(stage1.begin(), stage1.end());

  auto merge_close = [&](const std::vector<double>& sorted) {
    std::vector<double> merged;
    for (size_t k = 0; k < sorted.size();) {
      const double merge_tol =
          std::max(1e3 * refinement_tol, 1e-9) * std::max(1.0, std::abs(sorted[k]));
      size_t e = k + 1;
      double sum = sorted[k];
      while (e < sorted.size() && sorted[e] - sorted[k] <= merge_tol)
        sum += sorted[e++];
      merged.push_back(sum / static_cast<double>(e - k));
      k = e;
    }
    return merged;
  };

  // Stage 2: for each eigenvalue cluster at a stage-1 candidate, re-refine by
  // minimizing the cluster variance |sum (lambda_i - mean)^2|. Individual
  // eigenvalues near a high-order coalescence carry noise with a
  // roots-of-unity phase pattern that cancels in this symmetric function,
  // and the variance shrinks linearly in the loss offset, so this stays
  // sharp where the raw gap function is noise-flooded.
  const double grid_lo = sw.gamma_grid[0];
  const double grid_hi = sw.gamma_grid[steps - 1];
  std::vector<double> stage2;
  for (const double c1 : merge_close(stage1)) {
    const Matrix h1 = sw.builder(c1);
    const Eigensystem eig = eigendecompose(h1);
    const double scale = 1.0 + eig.values.cwiseAbs().maxCoeff();
    const auto clusters = cluster_eigenvalues(eig.values, opt.cluster_scale * scale);
    for (const auto& cluster : clusters) {
      const int g = static_cast<int>(cluster.size());
      if (g < 2) continue;
      Complex seed = 0.0;
      for (int k : cluster) seed += eig.values[k];
      seed /= static_cast<double>(g);

      // A symmetry-protected semisimple degeneracy keeps its full eigenspace;
      // it never sharpens into a defect, so skip it early. The loose
      // tolerance admits genuine points still offset by stage-1 noise.
      const int loose = null_dimension(h1, seed, 5e-3 * scale);
      if (loose >= g) continue;

      auto cluster_variance = [&](double gamma) {
        const Vector vals = eigenvalues_sorted(sw.builder(gamma));
        std::vector<int> idx(vals.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + g, idx.end(), [&](int a, int b) {
          return std::abs(vals[a] - seed) < std::abs(vals[b] - seed);
        });
        Complex mean = 0.0;
        for (int k = 0; k < g; ++k) mean += vals[idx[k]];
        mean /= static_cast<double>(g);
        Complex second = 0.0;
        for (int k = 0; k < g; ++k) {
          const Complex d = vals[idx[k]] - mean;
          second += d * d;
        }
        return std::abs(second);
      };
      const double w = opt.defect_refine_window * std::max(1.0, std::abs(c1));
      const double lo = std::max(grid_lo, c1 - w);
      const double hi = std::min(grid_hi, c1 + w);
      if (lo < hi) stage2.push_back(golden_min(cluster_variance, lo, hi, refinement_tol));
    }
  }
  std::sort(stage2.begin(), stage2.end());

  std::vector<EPRecord> records;
  for (const double gamma_c : merge_close(stage2)) {
    const Matrix h = sw.builder(gamma_c);
    const Eigensystem eig = eigendecompose(h);
    const double scale = 1.0 + eig.values.cwiseAbs().maxCoeff();
    const auto clusters = cluster_eigenvalues(eig.values, opt.cluster_scale * scale);

    for (const auto& cluster : clusters) {
      const int g = static_cast<int>(cluster.size());
      if (g < 2) continue;

      Complex center = 0.0;
      for (int k : cluster) center += eig.values[k];
      center /= static_cast<double>(g);

      const int eigenspace = null_dimension(h, center, opt.defect_tol * scale);
      if (eigenspace < 1 || eigenspace >= g) continue;  // not defective here

      EPRecord rec;
      rec.gamma_c = gamma_c;
      rec.coalescing_count = g;
      rec.independent_vectors = eigenspace;
      rec.order_estimate =
          static_cast<int>(std::lround(static_cast<double>(g) / eigenspace));

      double overlap = 0.0;
      for (int a = 0; a < g; ++a)
        for (int b = a + 1; b < g; ++b)
          overlap = std::max(overlap, std::abs(eig.vectors.col(cluster[a])
                                                   .dot(eig.vectors.col(cluster[b]))));
      rec.eigenvector_overlap = std::min(overlap, 1.0);

      // Branch identities: optimally match the branch values at the nearest
      // grid point to the eigenvalues here; the ones landing in the cluster
      // are the coalescing branches.
      int nearest = 0;
      for (int t = 1; t < steps; ++t)
        if (std::abs(sw.gamma_grid[t] - gamma_c) <
            std::abs(sw.gamma_grid[nearest] - gamma_c))
          nearest = t;
      RealMatrix cost(n, n);
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < n; ++k)
          cost(b, k) = std::norm(sw.branches(b, nearest) - eig.values[k]);
      const std::vector<int> match = min_cost_assignment(cost);
      for (int b = 0; b < n; ++b)
        if (std::find(cluster.begin(), cluster.end(), match[b]) != cluster.end())
          rec.coalescing_branch_ids.push_back(b);

      // Splitting exponent: log-log fit of the smallest nonzero gap inside
      // the cluster as the loss rate is pushed past gamma_c.
      const double eps_scale = std::max(1.0, gamma_c);
      std::vector<double> log_eps, log_gap;
      for (int p = 0; p < opt.fit_points; ++p) {
        const double frac =
            opt.fit_points > 1 ? static_cast<double>(p) / (opt.fit_points - 1) : 0.0;
        const double eps = opt.fit_eps_min *
                           std::pow(opt.fit_eps_max / opt.fit_eps_min, frac) *
                           eps_scale;
        const Vector vals = eigenvalues_sorted(sw.builder(gamma_c + eps));
        RealMatrix shift_cost(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            shift_cost(a, b) = std::norm(eig.values[a] - vals[b]);
        const std::vector<int> shift = min_cost_assignment(shift_cost);
        double smallest = std::numeric_limits<double>::infinity();
        for (int a = 0; a < g; ++a)
          for (int b = a + 1; b < g; ++b) {
            const double gap =
                std::abs(vals[shift[cluster[a]]] - vals[shift[cluster[b]]]);
            if (gap > gap_floor) smallest = std::min(smallest, gap);
          }
        if (std::isfinite(smallest) && smallest > 0.0) {
          log_eps.push_back(std::log(eps));
          log_gap.push_back(std::log(smallest));
        }
      }
      const LinearFit fit = fit_line(log_eps, log_gap);
      rec.scaling_exponent = fit.valid ? fit.slope : 0.0;
      rec.fit_residual = fit.max_residual;
      rec.classified =
          fit.valid && fit.max_residual <= opt.fit_residual_max &&
          std::abs(fit.slope - 1.0 / rec.order_estimate) <= opt.classify_tol;

      std::sort(rec.coalescing_branch_ids.begin(), rec.coalescing_branch_ids.end());
      records.push_back(std::move(rec));
    }
  }

  std::sort(records.begin(), records.end(),
            [](const EPRecord& a, const EPRecord& b) { return a.gamma_c < b.gamma_c; });
  return records;
}

bool is_critical_loss(const LatticeSpec& spec, double gamma,
                      const FindEpsOptions& opt) {
  const Matrix h = build_hamiltonian(spec, gamma);
  const Eigensystem eig = eigendecompose(h);
  const double scale = 1.0 + eig.values.cwiseAbs().maxCoeff();
  for (const auto& cluster : cluster_eigenvalues(eig.values, opt.cluster_scale * scale)) {
    const int g = static_cast<int>(cluster.size());
    if (g < 2) continue;
    Complex center = 0.0;
    for (int k : cluster) center += eig.values[k];
    center /= static_cast<double>(g);
    const int eigenspace = null_dimension(h, center, opt.defect_tol * scale);
    if (eigenspace >= 1 && eigenspace < g) return true;
  }
  return false;
}

Complex ep_splitting(double kappa, double eps) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ValidationError("ep_splitting: kappa must be positive and finite");
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw ValidationError("ep_splitting: eps must be positive and finite");
  LatticeSpec spec;
  spec.modes = 2;
  spec.kappa = kappa;
  spec.beta = 0.0;
  spec.loss = {1.0, 0.0};
  spec.boundary = Boundary::Open;
  const Eigensystem eig = eigendecompose(build_hamiltonian(spec, 2.0 * kappa + eps));
  const Complex a = eig.values[0], b = eig.values[1];
  return a.imag() > b.imag() ? a - b : b - a;
}

std::uint64_t count_multifurcation_points(int photons, int modes) {
  if (photons < 1)
    throw ValidationError("count_multifurcation_points: photons must be >= 1");
  if (modes < 2)
    throw ValidationError("count_multifurcation_points: modes must be >= 2");
  return binomial(photons + modes - 2, photons);
}

BranchingCount count_points_with_branching(int photons, int ep_photons, int modes) {
  if (photons < 1)
    throw ValidationError("count_points_with_branching: photons must be >= 1");
  if (modes < 2)
    throw ValidationError("count_points_with_branching: modes must be >= 2");
  if (ep_photons < 0 || ep_photons > photons)
    throw ValidationError(
        "count_points_with_branching: ep_photons must lie in [0, photons]");
  BranchingCount out;
  out.branches = ep_photons + 1;
  if (modes == 2)
    out.points = ep_photons == photons ? 1 : 0;
  else
    out.points = binomial(photons - ep_photons + modes - 3, photons - ep_photons);
  return out;
}

double sense_observable(const SenseConfig& config, double gamma) {
  config.lattice.validate();
  if (config.input.size() != config.lattice.modes)
    throw ValidationError("sense_observable: input amplitude count mismatch");

  const Matrix u = propagator(build_hamiltonian(config.lattice, gamma), config.z_f);
  const Vector a = u * config.input;
  if (config.observable == Observable::MeanTotalPhotons) return a.squaredNorm();

  if (config.photons < 1)
    throw ValidationError(
        "sense_observable: photons must be >= 1 for post-selected observables");
  const FockBasis basis = FockBasis::enumerate(config.photons, config.lattice.modes);
  const RealVector probabilities = postselect(project_to_fock(a, basis));
  return mean_photons_in(config.modes, basis, probabilities);
}

SlopeResult sensitivity_slope(const SenseConfig& config, double gamma0, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("sensitivity_slope: delta must be positive and finite");
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0))
    throw ValidationError("sensitivity_slope: gamma0 must be finite and >= 0");

  // At a critical loss rate the observable has a branch-point kink, so a
  // two-sided difference would straddle it; fall back to a forward step.
  SlopeResult out;
  out.one_sided = is_critical_loss(config.lattice, gamma0) || gamma0 - delta < 0.0;
  const double right = sense_observable(config, gamma0 + delta);
  if (out.one_sided)
    out.slope = (right - sense_observable(config, gamma0)) / delta;
  else
    out.slope = (right - sense_observable(config, gamma0 - delta)) / (2.0 * delta);
  return out;
}

}  // namespace epsim
