// Entanglement witnesses evaluated through the measurement game, and lower
// bounds on negativity derived from witness values.

#pragma once

#include <string>
#include <vector>

#include "mdi/decomp.hpp"
#include "mdi/game.hpp"
#include "mdi/sdp.hpp"

namespace mdi {

// Operator on `copies` copies of a state with per-copy dims `dims`, ordered
// copy-major: all parties of copy 0, then all parties of copy 1, ...
struct Witness {
  CMatrix op;
  DimList dims;
  int copies = 1;

  DimList full_dims() const;
  void validate() const;
};

// C(rho) = tr(W rho) - sum_k (tr(H_k rho)^2 + tr(J_k rho)^2)
struct NonlinearWitnessSpec {
  Witness base;
  std::vector<CMatrix> h;
  std::vector<CMatrix> j;
};

// I/d - Phi+ on d (x) d.
Witness bell_overlap_witness(int d);
// S_A (x) I_B - S_AB on (A, B, A', B'): tr(W rho (x) rho) = tr(rho_A^2) - tr(rho^2).
Witness swap_witness(int da, int db);
Witness witness_preset(const std::string& name);

NonlinearWitnessSpec build_nonlinear(const std::vector<CMatrix>& x, const Witness& w);
// W = (psi-)^{T_A} with X_k = (|psi-><k|)^{T_A} over the computational basis of 2 (x) 2.
NonlinearWitnessSpec transpose_nonlinear_spec();
double nonlinear_trusted(const NonlinearWitnessSpec& spec, const CMatrix& rho);

// Omega * mdi_value for a single-copy witness.
double linear_mdi(const Witness& w, const DensityMatrix& rho, const EveStrategy& strategy);
double linear_mdi(const LocalDecomposition& dec, const ProbabilityTable& table);

// Decompositions of W and every H_k, J_k over the same inputs.
struct NonlinearDecomposition {
  LocalDecomposition base;
  std::vector<LocalDecomposition> h;
  std::vector<LocalDecomposition> j;
};
NonlinearDecomposition decompose_nonlinear(const NonlinearWitnessSpec& spec);
double nonlinear_mdi(const NonlinearDecomposition& dec, const ProbabilityTable& table);
double nonlinear_mdi(const NonlinearWitnessSpec& spec, const DensityMatrix& rho, const EveStrategy& strategy);

// One strategy per copy; the copies are measured independently and the
// joint table is the product of the per-copy tables.
double multicopy_mdi(const Witness& w, const DensityMatrix& rho, const std::vector<EveStrategy>& strategies);
double multicopy_mdi(const LocalDecomposition& dec, const std::vector<ProbabilityTable>& tables);

// max(0, -value / (lambda_max - lambda_min)).
double bound_ftr(const CMatrix& w, double value);
// m if value < 0, else 0.
double bound_fm(double value, double m);

struct FoptOptions {
  int min_exponent = -6;
  int max_exponent = 6;
  int refinements = 3;
  SdpOptions solver{1e-11, 200000, 1.0};
};

struct FoptResult {
  double bound = 0.0;
  double alpha = 0.0;
  int evaluations = 0;
};

// max over alpha of alpha * value - mu_hat(alpha W), clamped at 0.
FoptResult bound_fopt(const CMatrix& w, const DimList& dims, double value, const FoptOptions& options = {});

}  // namespace mdi
