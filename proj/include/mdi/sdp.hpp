// Dense semidefinite programs over Hermitian blocks, solved by a
// Douglas-Rachford (ADMM) splitting between the affine constraint set and the
// PSD cone, plus the entanglement quantifiers built on top.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mdi/decomp.hpp"
#include "mdi/numerics.hpp"
#include "mdi/quantum.hpp"

namespace mdi {

using LinearMap = std::function<CMatrix(const CMatrix&)>;

// Minimize (or maximize) sum_b <C_b, X_b> + constant subject to linear
// equalities, with every block X_b Hermitian positive semidefinite.
// <A, X> denotes Re tr(A^dagger X).
class SdpProblem {
public:
  bool maximize = false;
  double constant = 0.0;

  int add_block(int n);
  void add_objective(int block, const CMatrix& c);
  void add_scalar_constraint(const std::vector<std::pair<int, CMatrix>>& terms, double rhs);
  // sum_t L_t(X_{b_t}) = rhs, imposed on every Hermitian component of the
  // output. Each map must send Hermitian matrices to Hermitian matrices.
  void add_map_constraint(const std::vector<std::pair<int, LinearMap>>& terms, const CMatrix& rhs);

  const std::vector<int>& blocks() const { return blocks_; }
  int variable_count() const;
  std::size_t constraint_count() const { return rows_.size(); }

  RMatrix constraint_matrix() const;
  RVector constraint_rhs() const;
  RVector objective_vector() const;

private:
  struct Row {
    std::vector<std::pair<int, RVector>> parts;
    double rhs = 0.0;
  };
  std::vector<int> blocks_;
  std::vector<int> offsets_;
  std::vector<RVector> objective_;
  std::vector<Row> rows_;

  void check_block(int block) const;
};

// Isometric coordinates of an n x n Hermitian matrix: diagonal entries, then
// sqrt(2) Re and sqrt(2) Im of each upper off-diagonal entry.
RVector hermitian_vec(const CMatrix& m);
CMatrix hermitian_unvec(const RVector& v, int n);

enum class SdpStatus { Converged, Unconverged, Infeasible };
std::string to_string(SdpStatus status);

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 50000;
  double penalty = 1.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::Unconverged;
  double value = 0.0;       // primal objective at the returned iterate
  double dual_value = 0.0;  // b^T y of the matching dual iterate
  std::vector<CMatrix> blocks;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

// (||rho^Gamma||_1 - tr rho) / 2 with Gamma transposing `parties`. Also valid
// for unnormalized positive operators.
double negativity(const CMatrix& rho, const DimList& dims, const std::vector<int>& parties = {0});

struct StateQuantifierOptions {
  // Flat input indices to keep; empty keeps every row of the table.
  std::vector<int> input_subset;
  // Replaces the per-input constraints with the single averaged constraint
  // tr(rho_i I/Omega) = mean_k P(i|k), as if no inputs were sent.
  bool without_inputs = false;
  SdpOptions solver;
};

// Lower bound on the negativity (party 0 against the rest) of every state
// compatible with the table. Ancilla of party j receives tau^T for each tau
// in inputs[j].
SdpSolution mdi_quantify_state(const ProbabilityTable& table, const std::vector<LocalStateSet>& inputs,
                               const StateQuantifierOptions& options = {});

// Memory table: rows flatten (s, t), columns i. Constraints use
// tr[rho_i (x_s (x) y_t)] = P(i|s,t) with x_s = inputs_a[s]^T and
// y_t = inputs_b[t]^T, together with sum_i rho_i <= I.
SdpSolution mdi_quantify_memory(const std::vector<double>& table, const LocalStateSet& inputs_a,
                                const LocalStateSet& inputs_b, const SdpOptions& options = {});

// min tr N over N >= 0 with N and J + N both PPT.
SdpSolution robustness_ppt(const ChoiState& choi, const SdpOptions& options = {});

// sup over states rho of alpha tr(W rho) - negativity(rho).
SdpSolution legendre_hat(const CMatrix& w, const DimList& dims, double alpha, const SdpOptions& options = {});

}  // namespace mdi
