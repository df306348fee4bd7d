// Operator bases and measurement primitives for a single qudit.

#pragma once

#include <vector>

#include "mdi/numerics.hpp"

namespace mdi {

// Generalized Gell-Mann basis. Element 0 is the identity, then the d-1
// diagonal elements, then the symmetric and antisymmetric off-diagonal
// elements, each family in lexicographic (mu, nu) order with mu < nu.
// shifts[k] is the smallest a with B_k + a*I positive semidefinite.
struct OperatorBasis {
  int dim = 0;
  std::vector<CMatrix> elements;
  std::vector<double> shifts;

  // tr(B_k^2): d for the identity, 2 for the traceless elements.
  double norm_sq(int k) const { return k == 0 ? static_cast<double>(dim) : 2.0; }
};

struct LocalStateSet {
  int dim = 0;
  std::vector<CMatrix> states;

  LocalStateSet transposed() const;
  RMatrix gram() const;
};

// U_{nm} = sum_k exp(2 pi i k n / d) |k><(k+m) mod d|, stored at index n*d + m.
struct HeisenbergWeylSet {
  int dim = 0;
  std::vector<CMatrix> unitaries;
};

// Projectors onto (I (x) U_i)|Phi+> on the doubled space, first factor the
// ancilla, second factor the system.
struct BellProjectorSet {
  int dim = 0;
  std::vector<CMatrix> projectors;
};

// Row k of `forward` holds the coefficients of U_i tau_k U_i^dagger in the
// Gell-Mann basis.
struct SettingTransform {
  int dim = 0;
  int setting = 0;
  RMatrix forward;
  RMatrix inverse;
};

OperatorBasis gell_mann_basis(int d);
LocalStateSet local_states(const OperatorBasis& basis);
HeisenbergWeylSet heisenberg_weyl(int d);
BellProjectorSet bell_projectors(const HeisenbergWeylSet& hw);
SettingTransform setting_transform(const OperatorBasis& basis, const LocalStateSet& states,
                                   const HeisenbergWeylSet& hw, int i);

// Coefficients of each basis element B_k in terms of the local states:
// B_k = sum_k' S(k, k') tau_k'. Closed form from the shifts.
RMatrix basis_to_states(const OperatorBasis& basis);

// Bundles every single-qudit object a protocol needs for dimension d.
struct QuditToolkit {
  int dim = 0;
  OperatorBasis basis;
  LocalStateSet states;
  HeisenbergWeylSet hw;
  BellProjectorSet bell;
  std::vector<SettingTransform> transforms;
  RMatrix shift_substitution;  // basis_to_states(basis)
};

// Cached per dimension; safe to call from several threads.
const QuditToolkit& qudit_toolkit(int d);

}  // namespace mdi
