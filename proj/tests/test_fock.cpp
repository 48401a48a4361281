#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <epsim/assignment.hpp>
#include <epsim/fock.hpp>
#include <epsim/lattice.hpp>
#include <epsim/spectral.hpp>

using namespace epsim;

TEST_CASE("binomial coefficients") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(7, 2) == 21);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(64, 32) == 1832624140942590534ULL);
  CHECK_THROWS_AS(binomial(100, 50), NumericError);
}

TEST_CASE("two-mode basis is in colexicographic order") {
  FockBasis basis = FockBasis::enumerate(6, 2);
  REQUIRE(basis.dimension() == 7);
  for (int k = 0; k <= 6; ++k) {
    CHECK(basis.occupation(k) == std::vector<int>{6 - k, k});
  }
  CHECK(basis.label(0) == "6_0");
  CHECK(basis.label(6) == "0_6");
}

TEST_CASE("three-mode basis order and index lookup") {
  FockBasis basis = FockBasis::enumerate(2, 3);
  REQUIRE(basis.dimension() == 6);
  const std::vector<std::vector<int>> expected = {
      {2, 0, 0}, {1, 1, 0}, {0, 2, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 2}};
  for (int k = 0; k < 6; ++k) {
    CHECK(basis.occupation(k) == expected[k]);
    CHECK(basis.index_of(expected[k]) == k);
  }
  CHECK_THROWS_AS(basis.index_of({3, 0, 0}), ValidationError);
  CHECK_THROWS_AS(basis.index_of({1, 1}), ValidationError);
}

TEST_CASE("basis size and caps") {
  CHECK(FockBasis::enumerate(0, 3).dimension() == 1);
  CHECK(FockBasis::enumerate(2, 6).dimension() == 21);
  CHECK(FockBasis::enumerate(4, 4).dimension() == 35);
  CHECK_THROWS_AS(FockBasis::enumerate(2000, 3), CapacityError);
  CHECK_THROWS_AS(FockBasis::enumerate(-1, 2), ValidationError);
  CHECK_THROWS_AS(FockBasis::enumerate(2, 0), ValidationError);
}

TEST_CASE("one-photon lift reproduces the single-photon hamiltonian") {
  LatticeSpec trimer{3, 0.8, 0.1, {0.0, 1.0, 0.0}, Boundary::Open};
  Matrix h1 = build_hamiltonian(trimer, 1.2);
  FockBasis basis = FockBasis::enumerate(1, 3);
  Matrix lifted = lift_hamiltonian(h1, basis);
  // one-photon occupation (.., 1 at m, ..) appears in guide order
  CHECK((lifted - h1).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("bosonic enhancement: two-photon hop carries sqrt(2)") {
  LatticeSpec dimer{2, 1.0, 0.0, {1.0, 0.0}, Boundary::Open};
  Matrix h1 = build_hamiltonian(dimer, 0.0);
  FockBasis basis = FockBasis::enumerate(2, 2);
  Matrix lifted = lift_hamiltonian(h1, basis);
  const int i20 = basis.index_of({2, 0});
  const int i11 = basis.index_of({1, 1});
  const int i02 = basis.index_of({0, 2});
  CHECK(std::abs(lifted(i11, i20) - Complex(std::sqrt(2.0), 0.0)) <= 1e-14);
  CHECK(std::abs(lifted(i02, i11) - Complex(std::sqrt(2.0), 0.0)) <= 1e-14);
  CHECK(std::abs(lifted(i02, i20)) <= 1e-14);  // two hops away
}

TEST_CASE("lift of a hermitian hamiltonian is hermitian; loss sits on the diagonal") {
  LatticeSpec trimer{3, 1.0, 0.0, {0.0, 1.0, 0.0}, Boundary::Open};
  FockBasis basis = FockBasis::enumerate(3, 3);
  Matrix lossless = lift_hamiltonian(build_hamiltonian(trimer, 0.0), basis);
  CHECK((lossless - lossless.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);

  Matrix lossy = lift_hamiltonian(build_hamiltonian(trimer, 1.5), basis);
  Matrix anti = lossy - lossless;  // purely diagonal, -i * Gamma * (lossy photons)
  for (int r = 0; r < anti.rows(); ++r) {
    for (int c = 0; c < anti.cols(); ++c) {
      if (r == c) {
        const double lossy_photons = basis.occupation(r)[1];
        CHECK(std::abs(anti(r, c) - Complex(0.0, -1.5 * lossy_photons)) <= 1e-14);
      } else {
        CHECK(std::abs(anti(r, c)) <= 1e-14);
      }
    }
  }
}

TEST_CASE("lifted spectrum equals occupation-weighted sums of single-photon eigenvalues") {
  struct Case {
    LatticeSpec spec;
    std::vector<double> critical;  // loss rates to stay away from
  };
  const double k2 = 1.0 / std::sqrt(2.0);
  const std::vector<Case> cases = {
      {{2, 1.0, 0.0, {1.0, 0.0}, Boundary::Open}, {2.0}},
      {{3, k2, 0.0, {0.0, 1.0, 0.0}, Boundary::Open}, {2.0}},
      {{4, k2, 0.3, {1.0, 0.0, 1.0, 0.0}, Boundary::Open},
       {std::sqrt(6.0 - 2.0 * std::sqrt(5.0)) * k2,
        std::sqrt(6.0 + 2.0 * std::sqrt(5.0)) * k2}},
  };
  // fixed pseudo-random loss rates, kept away from the critical values where
  // the lifted eigenproblem is legitimately ill-conditioned
  std::uint64_t state = 12345;
  auto next_gamma = [&state]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return 0.05 + 3.9 * static_cast<double>(state >> 11) /
                      static_cast<double>(1ULL << 53);
  };
  for (const auto& c : cases) {
    for (int n = 1; n <= 4; ++n) {
      FockBasis basis = FockBasis::enumerate(n, c.spec.modes);
      int done = 0;
      while (done < 5) {
        double gamma = next_gamma();
        bool near = false;
        for (double gc : c.critical) near = near || std::abs(gamma - gc) < 0.05;
        if (near) continue;
        ++done;
        Matrix h1 = build_hamiltonian(c.spec, gamma);
        Eigensystem one = eigendecompose(h1);
        Vector sums = lifted_eigenvalue_sums(one.values, basis);
        Eigensystem lifted = eigendecompose(lift_hamiltonian(h1, basis));
        CHECK(matched_multiset_distance(sums, lifted.values) <= 1e-8);
      }
    }
  }
}

TEST_CASE("fock graph of the lossy trimer at two photons") {
  LatticeSpec trimer{3, 1.0, 0.0, {0.0, 1.0, 0.0}, Boundary::Open};
  FockBasis basis = FockBasis::enumerate(2, 3);
  FockGraph graph = export_fock_graph(trimer, basis);
  CHECK(graph.nodes.size() == 6);
  CHECK(graph.edges.size() == 6);
  // loss column counts photons in the lossy middle guide
  CHECK(graph.nodes[basis.index_of({2, 0, 0})].loss == 0.0);
  CHECK(graph.nodes[basis.index_of({1, 1, 0})].loss == 1.0);
  CHECK(graph.nodes[basis.index_of({0, 2, 0})].loss == 2.0);
  // the (2,0,0) -- (1,1,0) hop is bosonically enhanced
  bool found = false;
  for (const auto& e : graph.edges) {
    if (e.from == basis.index_of({2, 0, 0}) && e.to == basis.index_of({1, 1, 0})) {
      CHECK(e.weight == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
      found = true;
    }
    CHECK(e.from < e.to);
  }
  CHECK(found);
}

TEST_CASE("fock graph sizes: ring at two photons and the empty sector") {
  LatticeSpec ring{6, 1.0, 0.0, {1, 0, 1, 0, 1, 0}, Boundary::Periodic};
  FockGraph hex = export_fock_graph(ring, FockBasis::enumerate(2, 6));
  CHECK(hex.nodes.size() == 21);
  CHECK(hex.edges.size() == 36);

  FockGraph empty = export_fock_graph(ring, FockBasis::enumerate(0, 6));
  CHECK(empty.nodes.size() == 1);
  CHECK(empty.edges.size() == 0);
}

TEST_CASE("dot serialization is deterministic and well-formed") {
  LatticeSpec dimer{2, 1.0, 0.0, {1.0, 0.0}, Boundary::Open};
  FockBasis basis = FockBasis::enumerate(1, 2);
  FockGraph graph = export_fock_graph(dimer, basis);
  std::ostringstream a, b;
  write_dot(graph, basis, a);
  write_dot(graph, basis, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("graph fock {") == 0);
  CHECK(a.str().find("\"1_0\"") != std::string::npos);
  CHECK(a.str().find("\"1_0\" -- \"0_1\"") != std::string::npos);
  CHECK(a.str().back() == '\n');
}
