// Characterizing a channel as a quantum memory with a single untrusted joint
// measurement on its output B and a trusted ancilla B'.

#pragma once

#include <vector>

#include "mdi/decomp.hpp"
#include "mdi/game.hpp"
#include "mdi/sdp.hpp"

namespace mdi {

struct MemoryProtocolRun {
  ChoiState channel;
  LocalStateSet inputs_a;  // tau_s; tau_s^T enters the channel
  LocalStateSet inputs_b;  // omega_t; omega_t^T enters the ancilla
  int outcomes = 0;
  std::vector<double> table;  // P(i|s,t) at (s * |omega| + t) * outcomes + i

  double at(int s, int t, int i) const;
  void validate(double tol = 1e-9) const;
};

// P(i|s,t) = tr[E_i (omega_t^T (x) N(tau_s^T))] on (B', B).
MemoryProtocolRun run_memory_protocol(const ChoiState& choi, const LocalStateSet& inputs_a,
                                      const LocalStateSet& inputs_b, const EveStrategy& strategy);
MemoryProtocolRun run_memory_protocol(const ChoiState& choi, const EveStrategy& strategy);

// Positive operators rho_i on (A, B') with P(i|s,t) = tr[rho_i (tau_s^T (x) omega_t^T)].
std::vector<CMatrix> memory_postselected_states(const ChoiState& choi, const EveStrategy& strategy);

// Value of the two-party game on the Choi state with party A pinned to the
// Phi+ outcome: (1/d_B^2) sum_i sum_{s,t} beta^{(0,i)}_{st} P(i|s,t) / d_A^2.
// `dec` must decompose a witness on (A, B') over the default local states.
double memory_mdi_value(const LocalDecomposition& dec, const MemoryProtocolRun& run);
// d_A d_B times the value; equals tr(W J) for faithful measurements.
double memory_c_value(const LocalDecomposition& dec, const MemoryProtocolRun& run);

SdpSolution quantify_memory(const MemoryProtocolRun& run, const SdpOptions& options = {});

}  // namespace mdi
