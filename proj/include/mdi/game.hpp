// The measurement game between a referee who prepares trusted inputs and an
// untrusted party who measures them together with the tested state.
//
// Each party j owns a doubled space ordered (A'_j, A_j): the ancilla carrying
// the input first, then its share of the tested state. Outcome and input
// indices run over d_j^2 values per party.

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "mdi/bases.hpp"
#include "mdi/decomp.hpp"
#include "mdi/quantum.hpp"

namespace mdi {

struct FaithfulStrategy {
  std::vector<Povm> povms;  // generalized Bell measurement per party
};

struct TrivialStrategy {
  DimList dims;
};

struct LosrTerm {
  double weight = 0.0;
  std::vector<Povm> povms;  // one per party, each with d_j^2 outcomes
};

struct ProductLosrStrategy {
  std::vector<LosrTerm> mixture;
};

// Joint POVM on (A'_0 A_0)(A'_1 A_1)..., indexed by the flat outcome i.
// certificates[i] lists product terms whose sum is elements[i]; each term
// holds one positive factor per party on that party's doubled space.
struct SeparableStrategy {
  DimList dims;
  std::vector<CMatrix> elements;
  std::vector<std::vector<std::vector<CMatrix>>> certificates;
};

using EveStrategy = std::variant<FaithfulStrategy, TrivialStrategy, ProductLosrStrategy, SeparableStrategy>;

DimList strategy_dims(const EveStrategy& strategy);
void validate_strategy(const EveStrategy& strategy, double tol = 1e-9);

EveStrategy faithful_strategy(const DimList& dims);
EveStrategy trivial_strategy(const DimList& dims);
EveStrategy random_losr_strategy(const DimList& dims, int n_components, std::uint64_t seed);
EveStrategy random_losr_strategy(const DimList& dims, int n_components, Rng& rng);
// One-way adaptive local measurements: each party in turn applies a POVM with
// `branching` outcomes chosen by the previous results, and every leaf of the
// resulting tree is assigned a random joint outcome.
EveStrategy random_separable_strategy(const DimList& dims, int branching, std::uint64_t seed);
EveStrategy random_separable_strategy(const DimList& dims, int branching, Rng& rng);

// Rewrites Faithful and Trivial strategies as single-term product mixtures.
ProductLosrStrategy as_product_losr(const EveStrategy& strategy);

// Exact table P(i|k) = tr[E_i (omega_k (x) rho)] where the ancilla of party j
// receives omega = tau^T for each tau in inputs[j]. With faithful Bell
// measurements this gives P(i|k) = tr[(U_i tau_k U_i^dagger)^{(x)} rho] / Omega.
ProbabilityTable run_protocol(const DensityMatrix& rho, const std::vector<LocalStateSet>& inputs,
                              const EveStrategy& strategy);
// Uses the Gell-Mann local states of each party as inputs.
ProbabilityTable run_protocol(const DensityMatrix& rho, const EveStrategy& strategy);

std::vector<LocalStateSet> default_inputs(const DimList& dims);

// State whose transpose reproduces the untrusted statistics:
// Omega * mdi_value(decompose(W), table) = tr(W sigma^T) for every W.
DensityMatrix eve_equivalent_state(const DensityMatrix& rho, const EveStrategy& strategy);

// Unnormalized ancilla operators rho_i = tr_A[E_i (I (x) rho)], flat over i.
// Their sum is the identity on the ancillas when rho is a state.
std::vector<CMatrix> postselected_states(const DensityMatrix& rho, const EveStrategy& strategy);

// Multinomial frequencies with `shots` draws per input row.
ProbabilityTable sample_table(const ProbabilityTable& table, long long shots, std::uint64_t seed);

}  // namespace mdi
