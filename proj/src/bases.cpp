#include "mdi/bases.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mdi {

LocalStateSet LocalStateSet::transposed() const {
  LocalStateSet out{dim, {}};
  for (const auto& s : states) out.states.push_back(s.transpose());
  return out;
}

RMatrix LocalStateSet::gram() const {
  const auto n = static_cast<Eigen::Index>(states.size());
  RMatrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) g(a, b) = hs_inner(states[a], states[b]);
  return g;
}

OperatorBasis gell_mann_basis(int d) {
  if (d < 2) throw Error(ErrorKind::Dimension, "gell_mann_basis: d must be >= 2");
  OperatorBasis b;
  b.dim = d;
  b.elements.push_back(identity(d));
  b.shifts.push_back(0.0);
  for (int lam = 0; lam <= d - 2; ++lam) {
    CMatrix m = CMatrix::Zero(d, d);
    for (int j = 0; j <= lam; ++j) m(j, j) = 1.0;
    m(lam + 1, lam + 1) = -(lam + 1.0);
    m *= std::sqrt(2.0 / ((lam + 1.0) * (lam + 2.0)));
    b.elements.push_back(m);
    const double k = lam + 1.0;
    b.shifts.push_back(std::sqrt(2.0 * k / (k + 1.0)));
  }
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) {
      CMatrix m = CMatrix::Zero(d, d);
      m(mu, nu) = 1.0;
      m(nu, mu) = 1.0;
      b.elements.push_back(m);
      b.shifts.push_back(1.0);
    }
  const cplx I(0.0, 1.0);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) {
      CMatrix m = CMatrix::Zero(d, d);
      m(mu, nu) = -I;
      m(nu, mu) = I;
      b.elements.push_back(m);
      b.shifts.push_back(1.0);
    }
  return b;
}

LocalStateSet local_states(const OperatorBasis& basis) {
  const int d = basis.dim;
  LocalStateSet s;
  s.dim = d;
  s.states.push_back(basis.elements[0] / static_cast<double>(d));
  for (std::size_t k = 1; k < basis.elements.size(); ++k) {
    if (!(basis.shifts[k] > 0.0)) throw Error(ErrorKind::Value, "local_states: zero shift for a traceless element");
    s.states.push_back((basis.elements[0] + basis.elements[k] / basis.shifts[k]) / static_cast<double>(d));
  }
  return s;
}

HeisenbergWeylSet heisenberg_weyl(int d) {
  if (d < 2) throw Error(ErrorKind::Dimension, "heisenberg_weyl: d must be >= 2");
  HeisenbergWeylSet hw;
  hw.dim = d;
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) {
      CMatrix u = CMatrix::Zero(d, d);
      for (int k = 0; k < d; ++k) u(k, (k + m) % d) = std::polar(1.0, 2.0 * std::numbers::pi * k * n / d);
      hw.unitaries.push_back(u);
    }
  return hw;
}

BellProjectorSet bell_projectors(const HeisenbergWeylSet& hw) {
  const int d = hw.dim;
  CVector phi = CVector::Zero(d * d);
  for (int j = 0; j < d; ++j) phi(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
  BellProjectorSet out;
  out.dim = d;
  for (const auto& u : hw.unitaries) {
    const CVector v = kron(identity(d), u) * phi;
    out.projectors.push_back(v * v.adjoint());
  }
  return out;
}

SettingTransform setting_transform(const OperatorBasis& basis, const LocalStateSet& states,
                                   const HeisenbergWeylSet& hw, int i) {
  const int d = basis.dim;
  if (states.dim != d || hw.dim != d) throw Error(ErrorKind::Dimension, "setting_transform: dimension mismatch");
  if (i < 0 || i >= d * d) throw Error(ErrorKind::Dimension, "setting_transform: setting out of range");
  const int n = d * d;
  SettingTransform t;
  t.dim = d;
  t.setting = i;
  t.forward.resize(n, n);
  const CMatrix& u = hw.unitaries[i];
  for (int k = 0; k < n; ++k) {
    const CMatrix rotated = u * states.states[k] * u.adjoint();
    for (int kp = 0; kp < n; ++kp) t.forward(k, kp) = hs_inner(basis.elements[kp], rotated) / basis.norm_sq(kp);
  }
  Eigen::FullPivLU<RMatrix> lu(t.forward);
  if (!lu.isInvertible()) throw Error(ErrorKind::Value, "setting_transform: singular transform");
  t.inverse = lu.inverse();
  if ((t.forward * t.inverse - RMatrix::Identity(n, n)).norm() > 1e-10)
    throw Error(ErrorKind::Value, "setting_transform: inverse check failed");
  return t;
}

RMatrix basis_to_states(const OperatorBasis& basis) {
  const int d = basis.dim;
  const int n = d * d;
  RMatrix s = RMatrix::Zero(n, n);
  s(0, 0) = d;
  for (int k = 1; k < n; ++k) {
    s(k, k) = basis.shifts[k] * d;
    s(k, 0) = -basis.shifts[k] * d;
  }
  return s;
}

const QuditToolkit& qudit_toolkit(int d) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuditToolkit>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return *it->second;
  auto tk = std::make_unique<QuditToolkit>();
  tk->dim = d;
  tk->basis = gell_mann_basis(d);
  tk->states = local_states(tk->basis);
  tk->hw = heisenberg_weyl(d);
  tk->bell = bell_projectors(tk->hw);
  for (int i = 0; i < d * d; ++i) tk->transforms.push_back(setting_transform(tk->basis, tk->states, tk->hw, i));
  tk->shift_substitution = basis_to_states(tk->basis);
  const auto& ref = *tk;
  cache.emplace(d, std::move(tk));
  return ref;
}

}  // namespace mdi
