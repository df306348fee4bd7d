#include <gtest/gtest.h>

#include <cmath>

#include "mdi/decomp.hpp"
#include "mdi/quantum.hpp"

using namespace mdi;

namespace {

CMatrix bell_overlap_witness() { return identity(4) / 2.0 - max_entangled(2).matrix; }

// P(i|k) = tr[(U_i tau_k U_i^dagger)^{(x)} rho] / Omega, the table produced by
// faithful Bell measurements.
ProbabilityTable faithful_table(const CMatrix& rho, const DimList& dims) {
  auto table = ProbabilityTable::zeros(dims);
  const auto sizes = table.input_sizes;
  double omega = 1.0;
  for (int d : dims) omega *= d;
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const auto k = unflatten_index(r, sizes);
      const auto i = unflatten_index(c, sizes);
      std::vector<CMatrix> f;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        const auto& tk = qudit_toolkit(dims[j]);
        const CMatrix& u = tk.hw.unitaries[i[j]];
        f.push_back(u * tk.states.states[k[j]] * u.adjoint());
      }
      table.at(r, c) = trace_real(kron_all(f) * rho) / omega;
    }
  return table;
}

CMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = rng.ginibre(n, n);
  return (g + g.adjoint()) / 2.0;
}

}  // namespace

TEST(Decompose, IdentityOnTwoQubits) {
  auto dec = decompose(identity(4), {2, 2});
  EXPECT_NEAR(dec.base()[0], 4.0, 1e-12);
  for (std::size_t a = 1; a < dec.base().size(); ++a) EXPECT_NEAR(dec.base()[a], 0.0, 1e-12);
  EXPECT_TRUE(dec.diagnostics().empty());
}

TEST(Decompose, BellOverlapGellMannCoefficients) {
  auto dec = decompose(bell_overlap_witness(), {2, 2});
  const auto& g = dec.gell_mann_coefficients();
  // Basis order per qubit: I, Z, X, Y.
  EXPECT_NEAR(g[0], 0.25, 1e-14);
  EXPECT_NEAR(g[1 * 4 + 1], -0.25, 1e-14);
  EXPECT_NEAR(g[2 * 4 + 2], -0.25, 1e-14);
  EXPECT_NEAR(g[3 * 4 + 3], 0.25, 1e-14);
  double rest = 0.0;
  for (int a = 0; a < 16; ++a)
    if (a != 0 && a != 5 && a != 10 && a != 15) rest += std::abs(g[a]);
  EXPECT_LT(rest, 1e-14);
}

TEST(Decompose, ReconstructsRandomObservables) {
  Rng rng(12);
  const std::vector<DimList> cases{{2}, {3}, {2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};
  for (const auto& dims : cases)
    for (int t = 0; t < 5; ++t) {
      const CMatrix w = random_hermitian(dim_product(dims), rng);
      auto dec = decompose(w, dims);
      EXPECT_LT((dec.reconstruct() - w).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_TRUE(dec.diagnostics().empty());
      std::vector<int> i;
      for (int d : dims) i.push_back(rng.uniform_int(0, d * d - 1));
      EXPECT_LT((dec.reconstruct_setting(i) - w).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Decompose, SettingZeroIsTheBase) {
  Rng rng(3);
  auto dec = decompose(random_hermitian(9, rng), {3, 3});
  EXPECT_EQ(*dec.setting({0, 0}), dec.base());
  auto again = dec.setting({4, 7});
  EXPECT_EQ(again.get(), dec.setting({4, 7}).get());
}

TEST(Decompose, AllSettingsMatchesPerSetting) {
  Rng rng(5);
  const DimList dims{2, 3};
  auto dec = decompose(random_hermitian(6, rng), dims);
  const Tensor& all = dec.all_settings();
  for (int i0 = 0; i0 < 4; ++i0)
    for (int i1 = 0; i1 < 9; ++i1) {
      const auto beta = dec.setting({i0, i1});
      for (int k0 = 0; k0 < 4; ++k0)
        for (int k1 = 0; k1 < 9; ++k1) {
          const std::size_t flat = static_cast<std::size_t>(i0 * 4 + k0) * 81 + static_cast<std::size_t>(i1 * 9 + k1);
          EXPECT_NEAR(all.data[flat].real(), (*beta)[k0 * 9 + k1], 1e-10);
        }
    }
}

TEST(Decompose, RejectsBadInput) {
  CMatrix nonherm = identity(4);
  nonherm(0, 1) = 1.0;
  EXPECT_THROW(decompose(nonherm, {2, 2}), Error);
  EXPECT_THROW(decompose(identity(4), {2, 3}), Error);
  auto dec = decompose(identity(4), {2, 2});
  EXPECT_THROW(dec.setting({0, 4}), Error);
}

TEST(MdiValue, BellOverlapOnPhiPlus) {
  auto dec = decompose(bell_overlap_witness(), {2, 2});
  auto table = faithful_table(max_entangled(2).matrix, {2, 2});
  EXPECT_NEAR(mdi_value(dec, table), -0.125, 1e-12);
  EXPECT_NEAR(mdi_composite({mdi_value(dec, table)}, {1}, dec.omega(), combiner_preset("linear")), -0.5, 1e-12);
}

TEST(MdiValue, UniformTable) {
  auto dec = decompose(bell_overlap_witness(), {2, 2});
  EXPECT_NEAR(mdi_value(dec, ProbabilityTable::uniform({2, 2})), 0.0625, 1e-12);
}

TEST(MdiValue, FaithfulTableGivesScaledExpectation) {
  Rng rng(31);
  const std::vector<DimList> cases{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};
  for (const auto& dims : cases) {
    const int n = dim_product(dims);
    const CMatrix w = random_hermitian(n, rng);
    const CMatrix rho = random_density(dims, n, rng).matrix;
    auto dec = decompose(w, dims);
    auto table = faithful_table(rho, dims);
    EXPECT_NEAR(mdi_value(dec, table), trace_real(w * rho) / dec.omega(), 1e-10);
  }
}

TEST(MdiValue, TableShapeMismatch) {
  auto dec = decompose(identity(4), {2, 2});
  EXPECT_THROW(mdi_value(dec, ProbabilityTable::uniform({2, 3})), Error);
}

TEST(ProbabilityTable, ProductAndValidation) {
  auto a = faithful_table(max_entangled(2).matrix, {2, 2});
  a.validate();
  auto p = product_table(a, ProbabilityTable::uniform({2}));
  EXPECT_EQ(p.dims, (DimList{2, 2, 2}));
  p.validate();
  auto bad = ProbabilityTable::uniform({2});
  bad.entries[0] += 0.1;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Composite, Presets) {
  EXPECT_DOUBLE_EQ(mdi_composite({0.5, 0.25, 0.5}, {1, 1, 1}, 2.0, combiner_preset("nonlinear-sum-of-squares")),
                   1.0 - 0.25 - 1.0);
  EXPECT_DOUBLE_EQ(mdi_composite({0.5, 0.25}, {2, 1}, 2.0, combiner_preset("multicopy-product")), 2.0 * 0.5);
  EXPECT_THROW(combiner_preset("nope"), Error);
}
