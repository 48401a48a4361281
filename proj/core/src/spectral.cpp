#include "epsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace epsim {

namespace {

void require_square_finite(const Matrix& h, const char* who) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw ValidationError(std::string(who) + ": matrix must be square and non-empty");
  if (!h.allFinite()) throw NumericError(std::string(who) + ": non-finite matrix entries");
}

}  // namespace

Eigensystem eigendecompose(const Matrix& h, double condition_threshold) {
  require_square_finite(h, "eigendecompose");
  const int n = static_cast<int>(h.rows());

  Eigen::ComplexEigenSolver<Matrix> solver(h, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigendecompose: eigensolver failed to converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Vector& raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw[a].real() != raw[b].real()) return raw[a].real() < raw[b].real();
    return raw[a].imag() < raw[b].imag();
  });

  Eigensystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = raw[order[k]];
    Vector v = solver.eigenvectors().col(order[k]);
    v.normalize();
    int lead = 0;
    while (lead < n - 1 && std::abs(v[lead]) <= 1e-8) ++lead;
    const Complex pivot = v[lead];
    if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
    out.vectors.col(k) = v;
  }

  // BDCSVD scales to the lifted problem sizes; it falls back to Jacobi for
  // small matrices, so accuracy near defective points is unchanged
  Eigen::BDCSVD<Matrix> svd(out.vectors);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.defective = !(out.condition < condition_threshold);
  return out;
}

std::vector<std::vector<int>> cluster_eigenvalues(const Vector& values,
                                                  double linkage) {
  const int n = static_cast<int>(values.size());
  if (!(linkage >= 0.0) || !std::isfinite(linkage))
    throw ValidationError("cluster_eigenvalues: linkage must be finite and >= 0");

  // Union-find over indices; union any pair closer than the linkage.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) < linkage) {
        const int ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

Matrix propagator(const Matrix& h, double z, PropagatorMethod method) {
  require_square_finite(h, "propagator");
  if (!(z >= 0.0) || !std::isfinite(z))
    throw ValidationError("propagator: z must be finite and >= 0");

  Matrix u;
  if (method == PropagatorMethod::Auto) {
    Eigensystem eig = eigendecompose(h);
    if (!eig.defective) {
      Vector phases(eig.values.size());
      for (int k = 0; k < eig.values.size(); ++k)
        phases[k] = std::exp(Complex(0.0, -z) * eig.values[k]);
      u = eig.vectors * phases.asDiagonal() *
          eig.vectors.partialPivLu().solve(Matrix::Identity(h.rows(), h.cols()));
    } else {
      u = (Complex(0.0, -z) * h).exp();
    }
  } else if (method == PropagatorMethod::Eigenbasis) {
    Eigensystem eig = eigendecompose(h);
    Vector phases(eig.values.size());
    for (int k = 0; k < eig.values.size(); ++k)
      phases[k] = std::exp(Complex(0.0, -z) * eig.values[k]);
    u = eig.vectors * phases.asDiagonal() *
        eig.vectors.partialPivLu().solve(Matrix::Identity(h.rows(), h.cols()));
  } else {
    u = (Complex(0.0, -z) * h).exp();
  }

  if (!u.allFinite()) throw NumericError("propagator: evolution overflowed to non-finite values");
  return u;
}

}  // namespace epsim
