#include <gtest/gtest.h>

#include <cmath>

#include "mdi/game.hpp"

using namespace mdi;

namespace {

// omega_k on the ancillas and rho on the systems, reordered to
// (A'_0 A_0)(A'_1 A_1)...
CMatrix joint_input(const DensityMatrix& rho, const std::vector<int>& k) {
  const std::size_t n = rho.dims.size();
  std::vector<CMatrix> anc;
  DimList dims;
  for (std::size_t j = 0; j < n; ++j) {
    anc.push_back(qudit_toolkit(rho.dims[j]).states.states[k[j]].transpose());
    dims.push_back(rho.dims[j]);
  }
  dims.insert(dims.end(), rho.dims.begin(), rho.dims.end());
  std::vector<int> perm;
  for (std::size_t j = 0; j < n; ++j) {
    perm.push_back(static_cast<int>(j));
    perm.push_back(static_cast<int>(n + j));
  }
  return permute_subsystems(kron(kron_all(anc), rho.matrix), dims, perm);
}

// Born rule evaluated on the full joint space.
ProbabilityTable brute_force_table(const DensityMatrix& rho, const EveStrategy& strategy) {
  auto table = ProbabilityTable::zeros(rho.dims);
  const auto& sizes = table.input_sizes;
  std::vector<std::pair<double, std::vector<CMatrix>>> elements;
  if (const auto* s = std::get_if<SeparableStrategy>(&strategy)) {
    elements.push_back({1.0, s->elements});
  } else {
    for (const auto& term : as_product_losr(strategy).mixture) {
      std::vector<CMatrix> joint;
      for (std::size_t c = 0; c < table.cols(); ++c) {
        const auto i = unflatten_index(c, sizes);
        std::vector<CMatrix> f;
        for (std::size_t j = 0; j < i.size(); ++j) f.push_back(term.povms[j].elements[i[j]]);
        joint.push_back(kron_all(f));
      }
      elements.push_back({term.weight, joint});
    }
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const CMatrix x = joint_input(rho, unflatten_index(r, sizes));
    for (const auto& [w, joint] : elements)
      for (std::size_t c = 0; c < table.cols(); ++c) table.at(r, c) += w * trace_real(joint[c] * x);
  }
  return table;
}

double max_gap(const ProbabilityTable& a, const ProbabilityTable& b) {
  double g = 0.0;
  for (std::size_t e = 0; e < a.entries.size(); ++e) g = std::max(g, std::abs(a.entries[e] - b.entries[e]));
  return g;
}

CMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = rng.ginibre(n, n);
  return (g + g.adjoint()) / 2.0;
}

// W = P + Q^{T_B} with P, Q positive: nonnegative on every product state.
CMatrix random_decomposable_witness(const DimList& dims, Rng& rng) {
  const int n = dim_product(dims);
  const CVector v = random_pure(n, rng);
  const CMatrix q = v * v.adjoint();
  const CMatrix g = rng.ginibre(n, 1);
  return 0.1 * g * g.adjoint() + partial_transpose(q, dims, 1);
}

}  // namespace

TEST(Game, FaithfulPhiPlusCornerEntry) {
  auto table = run_protocol(max_entangled(2), faithful_strategy({2, 2}));
  EXPECT_NEAR(table.at({0, 0}, {0, 0}), 1.0 / 16.0, 1e-15);
  table.validate(1e-12);
}

TEST(Game, TrivialIsExactlyUniform) {
  Rng rng(1);
  auto rho = random_density(DimList{2, 2}, 4, rng);
  auto table = run_protocol(rho, trivial_strategy({2, 2}));
  for (double p : table.entries) EXPECT_EQ(p, 1.0 / 16.0);
  auto losr = as_product_losr(trivial_strategy({2, 2}));
  EXPECT_LT(max_gap(run_protocol(rho, EveStrategy{losr}), table), 1e-15);
}

TEST(Game, FaithfulMatchesRotatedStateIdentity) {
  Rng rng(2);
  for (const DimList& dims : std::vector<DimList>{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}}) {
    auto rho = random_density(dims, dim_product(dims), rng);
    auto table = run_protocol(rho, faithful_strategy(dims));
    const double omega = dim_product(dims);
    double gap = 0.0;
    for (std::size_t r = 0; r < table.rows(); ++r)
      for (std::size_t c = 0; c < table.cols(); ++c) {
        const auto k = unflatten_index(r, table.input_sizes);
        const auto i = unflatten_index(c, table.output_sizes);
        std::vector<CMatrix> f;
        for (std::size_t j = 0; j < dims.size(); ++j) {
          const auto& tk = qudit_toolkit(dims[j]);
          f.push_back(tk.hw.unitaries[i[j]] * tk.states.states[k[j]] * tk.hw.unitaries[i[j]].adjoint());
        }
        gap = std::max(gap, std::abs(table.at(r, c) - trace_real(kron_all(f) * rho.matrix) / omega));
      }
    EXPECT_LT(gap, 1e-10);
  }
}

TEST(Game, MatchesBruteForceBornRule) {
  Rng rng(3);
  for (const DimList& dims : std::vector<DimList>{{2, 2}, {2, 3}}) {
    auto rho = random_density(dims, 2, rng);
    EXPECT_LT(max_gap(run_protocol(rho, faithful_strategy(dims)), brute_force_table(rho, faithful_strategy(dims))), 1e-12);
    auto losr = random_losr_strategy(dims, 3, rng);
    EXPECT_LT(max_gap(run_protocol(rho, losr), brute_force_table(rho, losr)), 1e-12);
    auto sep = random_separable_strategy(dims, 2, rng);
    EXPECT_LT(max_gap(run_protocol(rho, sep), brute_force_table(rho, sep)), 1e-12);
  }
}

TEST(Strategies, AreValid) {
  EXPECT_NO_THROW(validate_strategy(faithful_strategy({2, 2})));
  EXPECT_EQ(std::get<FaithfulStrategy>(faithful_strategy({2, 2})).povms.size(), 2u);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_NO_THROW(validate_strategy(random_losr_strategy({2, 3}, 3, seed)));
    EXPECT_NO_THROW(validate_strategy(random_separable_strategy({2, 2}, 3, seed)));
  }
  EXPECT_NO_THROW(validate_strategy(random_separable_strategy({2, 2, 2}, 2, 4)));
}

TEST(Strategies, SeparableCertificateTamperingIsCaught) {
  auto s = std::get<SeparableStrategy>(random_separable_strategy({2, 2}, 2, 9));
  for (auto& e : s.elements)
    if (e.norm() > 0) {
      e(0, 0) += 1e-6;
      break;
    }
  EXPECT_THROW(validate_strategy(EveStrategy{s}), Error);
}

TEST(Strategies, DeterministicUnderSeed) {
  auto a = std::get<ProductLosrStrategy>(random_losr_strategy({2, 2}, 2, 17));
  auto b = std::get<ProductLosrStrategy>(random_losr_strategy({2, 2}, 2, 17));
  EXPECT_EQ(a.mixture[1].povms[0].elements[2], b.mixture[1].povms[0].elements[2]);
}

TEST(Game, DimensionMismatch) {
  EXPECT_THROW(run_protocol(max_entangled(2), faithful_strategy({2, 3})), Error);
  auto inputs = default_inputs({2, 3});
  EXPECT_THROW(run_protocol(max_entangled(2), inputs, faithful_strategy({2, 2})), Error);
}

TEST(EveState, ReproducesStatistics) {
  Rng rng(4);
  for (const DimList& dims : std::vector<DimList>{{2, 2}, {2, 3}}) {
    const int n = dim_product(dims);
    auto rho = random_density(dims, n, rng);
    for (const EveStrategy& s : {faithful_strategy(dims), random_losr_strategy(dims, 2, rng),
                                 random_separable_strategy(dims, 2, rng)}) {
      auto table = run_protocol(rho, s);
      auto sigma = eve_equivalent_state(rho, s);
      for (int t = 0; t < 20; ++t) {
        const CMatrix w = random_hermitian(n, rng);
        auto dec = decompose(w, dims);
        EXPECT_NEAR(dec.omega() * mdi_value(dec, table), trace_real(w * sigma.matrix.transpose()), 1e-9);
      }
    }
  }
}

TEST(EveState, FaithfulGivesTransposedState) {
  Rng rng(5);
  auto rho = random_density(DimList{2, 2}, 4, rng);
  auto sigma = eve_equivalent_state(rho, faithful_strategy({2, 2}));
  EXPECT_LT((sigma.matrix.transpose() - rho.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EveState, TrivialGivesMaximallyMixed) {
  Rng rng(6);
  auto rho = random_density(DimList{2, 3}, 6, rng);
  auto sigma = eve_equivalent_state(rho, EveStrategy{as_product_losr(trivial_strategy({2, 3}))});
  EXPECT_LT((sigma.matrix - identity(6) / 6.0).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EveState, SeparableInputStaysPpt) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    auto [rho, cert] = random_separable({2, 2}, 3, rng);
    auto sigma = eve_equivalent_state(rho, random_losr_strategy({2, 2}, 2, rng));
    EXPECT_GE(min_eigenvalue(partial_transpose(sigma.matrix, sigma.dims, 1)), -1e-10);
  }
}

TEST(PostselectedStates, SumToIdentity) {
  Rng rng(8);
  auto rho = random_density(DimList{2, 3}, 3, rng);
  for (const EveStrategy& s : {faithful_strategy({2, 3}), random_losr_strategy({2, 3}, 2, rng),
                               random_separable_strategy({2, 3}, 2, rng)}) {
    auto states = postselected_states(rho, s);
    CMatrix sum = CMatrix::Zero(6, 6);
    for (const auto& m : states) {
      EXPECT_GE(min_eigenvalue(hermitize(m)), -1e-12);
      sum += m;
    }
    EXPECT_LT((sum - identity(6)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Soundness, SeparableStatesNeverViolate) {
  Rng rng(9);
  double worst = 1.0;
  for (int t = 0; t < 200; ++t) {
    const DimList dims = t % 4 == 0 ? DimList{3, 3} : DimList{2, 2};
    auto [rho, cert] = random_separable(dims, 3, rng);
    auto dec = decompose(random_decomposable_witness(dims, rng), dims);
    const EveStrategy s = t % 2 == 0 ? random_losr_strategy(dims, 2, rng) : random_separable_strategy(dims, 2, rng);
    worst = std::min(worst, mdi_value(dec, run_protocol(rho, s)));
  }
  EXPECT_GE(worst, -1e-8);
}

TEST(SampleTable, Basics) {
  auto table = run_protocol(max_entangled(2), faithful_strategy({2, 2}));
  auto one = sample_table(table, 1, 3);
  for (std::size_t r = 0; r < one.rows(); ++r) {
    int hits = 0;
    double sum = 0.0;
    for (std::size_t c = 0; c < one.cols(); ++c) {
      sum += one.at(r, c);
      if (one.at(r, c) == 1.0) ++hits;
    }
    EXPECT_EQ(hits, 1);
    EXPECT_EQ(sum, 1.0);
  }
  EXPECT_EQ(sample_table(table, 100, 5).entries, sample_table(table, 100, 5).entries);
  auto big = sample_table(table, 1000000, 11);
  EXPECT_LT(max_gap(big, table), 5e-3);
  EXPECT_THROW(sample_table(table, 0, 1), Error);
}
