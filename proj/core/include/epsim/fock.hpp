#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "epsim/lattice.hpp"
#include "epsim/types.hpp"

namespace epsim {

// Exact binomial coefficient; throws NumericError on 64-bit overflow.
std::uint64_t binomial(int n, int k);

// All M-mode occupation vectors with N photons, in ascending colexicographic
// order (states sorted by n_M, then n_{M-1}, ...).  For M = 2 this is
// (N,0), (N-1,1), ..., (0,N).  Immutable and cheap to copy.
class FockBasis {
 public:
  // dimension_cap guards against accidental exponential blow-ups.
  static FockBasis enumerate(int photons, int modes,
                             std::uint64_t dimension_cap = 1000000);

  int photons() const { return data_->photons; }
  int modes() const { return data_->modes; }
  int dimension() const { return static_cast<int>(data_->states.size()); }
  const std::vector<int>& occupation(int index) const { return data_->states[index]; }
  const std::vector<std::vector<int>>& states() const { return data_->states; }

  // Index of an occupation vector; throws ValidationError if absent.
  int index_of(const std::vector<int>& occupation) const;

  // "n1_n2_..._nM", used for graph node ids and table column labels.
  std::string label(int index) const;

 private:
  struct Data {
    int photons = 0;
    int modes = 0;
    std::vector<std::vector<int>> states;
  };
  explicit FockBasis(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

// N-photon Hamiltonian on the basis: diagonal sum_m n_m H1(m,m), hop
// amplitudes H1(m',m) sqrt(n_m (n_m' + 1)) between states one hop apart.
Matrix lift_hamiltonian(const Matrix& h1, const FockBasis& basis);

// Multiset {sum_m n_m lambda_m} over the basis, sorted by (real, imag).
// Equals the lifted spectrum whenever {lambda_m} is the single-photon one.
Vector lifted_eigenvalue_sums(const Vector& single_photon_values, const FockBasis& basis);

// Undirected photon-walk graph of the lifted lattice.
struct FockGraph {
  struct Node {
    std::vector<int> occupation;
    double loss = 0.0;  // sum_m g_m n_m, in units of Gamma
  };
  struct Edge {
    int from = 0;
    int to = 0;        // from < to, basis indices
    double weight = 0.0;  // hop amplitude in units of kappa
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

FockGraph export_fock_graph(const LatticeSpec& spec, const FockBasis& basis);

// Deterministic DOT serialization (nodes then edges, basis order).
void write_dot(const FockGraph& graph, const FockBasis& basis, std::ostream& os);

}  // namespace epsim
