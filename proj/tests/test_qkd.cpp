#include <gtest/gtest.h>

#include <cmath>

#include "mdi/qkd.hpp"

using namespace mdi;

TEST(QkdTable, IdentityFaithfulEntries) {
  const auto table = run_qkd(identity_channel(2), faithful_strategy({2}));
  EXPECT_NO_THROW(table.validate());
  EXPECT_NEAR(table.at(0, Bb84::Z0, Bb84::Z0), 0.5, 1e-14);
  EXPECT_NEAR(table.at(0, Bb84::Z0, Bb84::Z1), 0.0, 1e-14);
  EXPECT_NEAR(table.at(0, Bb84::XPlus, Bb84::XPlus), 0.5, 1e-14);
  EXPECT_NEAR(table.at(0, Bb84::XPlus, Bb84::XMinus), 0.0, 1e-14);
}

TEST(QkdTable, TrivialAndConstant) {
  const auto trivial = run_qkd(identity_channel(2), trivial_strategy({2}));
  for (double p : trivial.entries) EXPECT_DOUBLE_EQ(p, 0.25);
  Rng rng(1);
  const auto sigma = random_density(DimList{2}, 2, rng);
  const auto table = run_qkd(constant_channel(sigma.matrix), random_losr_strategy({2}, 2, rng));
  for (int psi = 1; psi < 4; ++psi)
    for (int phi = 0; phi < 4; ++phi)
      for (int a = 0; a < 4; ++a) EXPECT_NEAR(table.at(a, psi, phi), table.at(a, 0, phi), 1e-13);
}

TEST(QkdTable, DimensionChecks) {
  EXPECT_THROW(run_qkd(identity_channel(3), faithful_strategy({3})), Error);
  EXPECT_THROW(run_qkd(identity_channel(2), faithful_strategy({3})), Error);
}

TEST(ErrorRates, PresetChannels) {
  const auto f = faithful_strategy({2});
  const auto id = error_rates(run_qkd(identity_channel(2), f), 0);
  ASSERT_TRUE(id);
  EXPECT_NEAR(id->bit, 0.0, 1e-14);
  EXPECT_NEAR(id->phase, 0.0, 1e-14);
  const auto zmp = error_rates(run_qkd(z_measure_prepare_channel(), f), 0);
  ASSERT_TRUE(zmp);
  EXPECT_NEAR(zmp->bit, 0.0, 1e-14);
  EXPECT_NEAR(zmp->phase, 0.5, 1e-14);
  const auto flip = error_rates(run_qkd(bit_flip_channel(), f), 0);
  ASSERT_TRUE(flip);
  EXPECT_NEAR(flip->bit, 1.0, 1e-14);
  EXPECT_NEAR(flip->phase, 0.0, 1e-14);
}

TEST(ErrorRates, AbortsWhenOutcomeNeverFires) {
  Povm silent{{2, 2}, {identity(4), CMatrix::Zero(4, 4), CMatrix::Zero(4, 4), CMatrix::Zero(4, 4)}};
  const EveStrategy s = ProductLosrStrategy{{LosrTerm{1.0, {silent}}}};
  const auto reports = key_reports(run_qkd(identity_channel(2), s));
  EXPECT_FALSE(reports[0].aborted);
  for (int a = 1; a < 4; ++a) {
    EXPECT_TRUE(reports[static_cast<std::size_t>(a)].aborted);
    EXPECT_EQ(reports[static_cast<std::size_t>(a)].bound, 0.0);
  }
}

TEST(KeyRate, Values) {
  EXPECT_DOUBLE_EQ(key_rate(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(key_rate(0.0, 0.5), 0.0);
  EXPECT_NEAR(key_rate(0.11, 0.11), 1.680836709440081e-4, 1e-12);
  EXPECT_EQ(key_rate(0.2, 0.2), 0.0);
  EXPECT_THROW(binary_entropy(1.5), Error);
}

TEST(QuantumnessBound, Presets) {
  const auto f = faithful_strategy({2});
  const auto id = key_reports(run_qkd(identity_channel(2), f));
  EXPECT_NEAR(id[0].key_rate, 1.0, 1e-12);
  EXPECT_NEAR(id[0].bound, 0.25, 1e-12);
  EXPECT_NEAR(aggregate_bound(id), 1.0, 1e-12);
  EXPECT_EQ(key_reports(run_qkd(z_measure_prepare_channel(), f))[0].bound, 0.0);
  for (const auto& r : key_reports(run_qkd(identity_channel(2), trivial_strategy({2})))) EXPECT_EQ(r.bound, 0.0);
}

TEST(QuantumnessBound, ZeroOnEntanglementBreakingChannels) {
  Rng rng(2);
  for (int c = 0; c < 10; ++c) {
    const auto eb = random_eb_channel(2, 2, rng.uniform_int(1, 4), rng);
    for (int t = 0; t < 10; ++t) {
      const EveStrategy s = t % 2 ? random_losr_strategy({2}, 2, rng) : random_separable_strategy({2}, 2, rng);
      EXPECT_NEAR(aggregate_bound(key_reports(run_qkd(eb, s))), 0.0, 1e-12);
    }
    EXPECT_NEAR(aggregate_bound(key_reports(run_qkd(eb, faithful_strategy({2})))), 0.0, 1e-12);
  }
}

TEST(QkdTable, BasisWeightsAgree) {
  Rng rng(3);
  std::vector<ChoiState> channels{identity_channel(2), depolarizing_channel(2, 0.3), z_measure_prepare_channel(),
                                  bit_flip_channel(), random_channel(2, 2, 2, rng)};
  for (const auto& ch : channels)
    for (int t = 0; t < 20; ++t) {
      const EveStrategy s = t % 2 ? random_losr_strategy({2}, 3, rng) : random_separable_strategy({2}, 2, rng);
      const auto table = run_qkd(ch, s);
      for (int a = 0; a < 4; ++a) EXPECT_NEAR(z_weight(table, a), x_weight(table, a), 1e-9);
    }
}
