#include "epsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace epsim {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k == 0 || k == n) return 1;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // multiply then divide stays exact: result * num is divisible by i here;
    // the wide intermediate avoids rejecting results that do fit in 64 bits
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(result) * static_cast<unsigned>(n - k + i) /
        static_cast<unsigned>(i);
    if (wide > UINT64_MAX) throw NumericError("binomial: 64-bit overflow");
    result = static_cast<std::uint64_t>(wide);
  }
  return result;
}

namespace {

// Colex order is lexicographic on the reversed occupation tuple.
bool colex_less(const std::vector<int>& a, const std::vector<int>& b) {
  for (int m = static_cast<int>(a.size()) - 1; m >= 0; --m)
    if (a[m] != b[m]) return a[m] < b[m];
  return false;
}

void enumerate_rec(int mode, int left, std::vector<int>& occ,
                   std::vector<std::vector<int>>& out) {
  if (mode == 0) {
    occ[0] = left;
    out.push_back(occ);
    return;
  }
  for (int n = 0; n <= left; ++n) {
    occ[mode] = n;
    enumerate_rec(mode - 1, left - n, occ, out);
  }
}

}  // namespace

FockBasis FockBasis::enumerate(int photons, int modes, std::uint64_t dimension_cap) {
  if (photons < 0) throw ValidationError("fock basis: photon number must be >= 0");
  if (modes < 1) throw ValidationError("fock basis: modes must be >= 1");
  const std::uint64_t dim = binomial(photons + modes - 1, photons);
  if (dim > dimension_cap)
    throw CapacityError("fock basis: dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(dimension_cap) +
                        "; reduce the photon number");

  auto data = std::make_shared<Data>();
  data->photons = photons;
  data->modes = modes;
  data->states.reserve(dim);
  std::vector<int> occ(modes, 0);
  enumerate_rec(modes - 1, photons, occ, data->states);
  return FockBasis(std::move(data));
}

int FockBasis::index_of(const std::vector<int>& occupation) const {
  const auto& states = data_->states;
  auto it = std::lower_bound(states.begin(), states.end(), occupation, colex_less);
  if (it == states.end() || *it != occupation)
    throw ValidationError("fock basis: occupation vector not in basis");
  return static_cast<int>(it - states.begin());
}

std::string FockBasis::label(int index) const {
  const auto& occ = data_->states.at(index);
  std::string s;
  for (size_t m = 0; m < occ.size(); ++m) {
    if (m) s += '_';
    s += std::to_string(occ[m]);
  }
  return s;
}

Matrix lift_hamiltonian(const Matrix& h1, const FockBasis& basis) {
  const int m = static_cast<int>(h1.rows());
  if (h1.cols() != m) throw ValidationError("lift_hamiltonian: matrix must be square");
  if (m != basis.modes())
    throw ValidationError("lift_hamiltonian: mode count mismatch with basis");
  if (!h1.allFinite()) throw NumericError("lift_hamiltonian: non-finite entries");

  const int dim = basis.dimension();
  Matrix lifted = Matrix::Zero(dim, dim);
  std::vector<int> target;
  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.occupation(s);
    Complex diag = 0.0;
    for (int i = 0; i < m; ++i) diag += static_cast<double>(occ[i]) * h1(i, i);
    lifted(s, s) = diag;

    for (int from = 0; from < m; ++from) {
      if (occ[from] == 0) continue;
      for (int to = 0; to < m; ++to) {
        if (to == from || h1(to, from) == Complex(0.0)) continue;
        target = occ;
        --target[from];
        ++target[to];
        const int t = basis.index_of(target);
        lifted(t, s) += h1(to, from) *
                        std::sqrt(static_cast<double>(occ[from]) * (occ[to] + 1.0));
      }
    }
  }
  return lifted;
}

Vector lifted_eigenvalue_sums(const Vector& single_photon_values, const FockBasis& basis) {
  if (single_photon_values.size() != basis.modes())
    throw ValidationError("lifted_eigenvalue_sums: value count mismatch with basis");
  const int dim = basis.dimension();
  std::vector<Complex> sums(dim);
  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.occupation(s);
    Complex total = 0.0;
    for (int m = 0; m < basis.modes(); ++m)
      total += static_cast<double>(occ[m]) * single_photon_values[m];
    sums[s] = total;
  }
  std::sort(sums.begin(), sums.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  Vector out(dim);
  for (int s = 0; s < dim; ++s) out[s] = sums[s];
  return out;
}

FockGraph export_fock_graph(const LatticeSpec& spec, const FockBasis& basis) {
  spec.validate();
  if (spec.modes != basis.modes())
    throw ValidationError("export_fock_graph: mode count mismatch with basis");

  // Unit-loss Hamiltonian supplies the adjacency; weights are scaled by kappa.
  const Matrix h1 = build_hamiltonian(spec, 0.0);
  const int dim = basis.dimension();

  FockGraph graph;
  graph.nodes.reserve(dim);
  for (int s = 0; s < dim; ++s) {
    FockGraph::Node node;
    node.occupation = basis.occupation(s);
    for (int m = 0; m < spec.modes; ++m)
      node.loss += spec.loss[m] * node.occupation[m];
    graph.nodes.push_back(std::move(node));
  }

  std::vector<int> target;
  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.occupation(s);
    for (int from = 0; from < spec.modes; ++from) {
      if (occ[from] == 0) continue;
      for (int to = 0; to < spec.modes; ++to) {
        if (to == from || h1(to, from) == Complex(0.0)) continue;
        target = occ;
        --target[from];
        ++target[to];
        const int t = basis.index_of(target);
        if (t <= s) continue;  // one edge per unordered pair
        FockGraph::Edge edge;
        edge.from = s;
        edge.to = t;
        edge.weight = std::abs(h1(to, from)) / spec.kappa *
                      std::sqrt(static_cast<double>(occ[from]) * (occ[to] + 1.0));
        graph.edges.push_back(edge);
      }
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const auto& a, const auto& b) {
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
  });
  return graph;
}

namespace {

std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

void write_dot(const FockGraph& graph, const FockBasis& basis, std::ostream& os) {
  os << "graph fock {\n";
  for (size_t s = 0; s < graph.nodes.size(); ++s)
    os << "  \"" << basis.label(static_cast<int>(s)) << "\" [loss="
       << format_float(graph.nodes[s].loss) << "];\n";
  for (const auto& e : graph.edges)
    os << "  \"" << basis.label(e.from) << "\" -- \"" << basis.label(e.to)
       << "\" [weight=" << format_float(e.weight) << "];\n";
  os << "}\n";
}

}  // namespace epsim
