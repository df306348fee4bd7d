#include "mdi/witness.hpp"

#include <cmath>
#include <map>

namespace mdi {

DimList Witness::full_dims() const {
  DimList out;
  for (int c = 0; c < copies; ++c) out.insert(out.end(), dims.begin(), dims.end());
  return out;
}

void Witness::validate() const {
  if (copies < 1) throw Error(ErrorKind::Value, "witness needs at least one copy");
  check_operator(op, full_dims());
  if (!is_hermitian(op)) throw Error(ErrorKind::Value, "witness operator is not Hermitian");
}

Witness bell_overlap_witness(int d) {
  const CMatrix w = identity(d * d) / static_cast<double>(d) - max_entangled(d).matrix;
  return Witness{w, {d, d}, 1};
}

Witness swap_witness(int da, int db) {
  const DimList full{da, db, da, db};
  const int n = dim_product(full);
  CMatrix swap_a = CMatrix::Zero(n, n), swap_ab = CMatrix::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const auto idx = unflatten_index(static_cast<std::size_t>(col), full);
    swap_a(static_cast<int>(flatten_index({idx[2], idx[1], idx[0], idx[3]}, full)), col) = 1.0;
    swap_ab(static_cast<int>(flatten_index({idx[2], idx[3], idx[0], idx[1]}, full)), col) = 1.0;
  }
  return Witness{swap_a - swap_ab, {da, db}, 2};
}

Witness witness_preset(const std::string& name) {
  if (name == "bell-overlap") return bell_overlap_witness(2);
  if (name == "swap-purity") return swap_witness(2, 2);
  if (name == "transpose-nonlinear") return transpose_nonlinear_spec().base;
  throw Error(ErrorKind::Value, "unknown witness preset: " + name);
}

NonlinearWitnessSpec build_nonlinear(const std::vector<CMatrix>& x, const Witness& w) {
  w.validate();
  if (w.copies != 1) throw Error(ErrorKind::Value, "nonlinear witnesses act on a single copy");
  NonlinearWitnessSpec spec{w, {}, {}};
  for (const auto& xk : x) {
    check_operator(xk, w.dims);
    spec.h.push_back((xk + xk.adjoint()) / 2.0);
    spec.j.push_back((xk - xk.adjoint()) / cplx(0.0, 2.0));
  }
  return spec;
}

NonlinearWitnessSpec transpose_nonlinear_spec() {
  const DimList dims{2, 2};
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  const CMatrix w = partial_transpose(psi * psi.adjoint(), dims, 0);
  std::vector<CMatrix> x;
  for (int k = 0; k < 4; ++k) {
    CVector e = CVector::Zero(4);
    e(k) = 1.0;
    x.push_back(partial_transpose(psi * e.adjoint(), dims, 0));
  }
  return build_nonlinear(x, Witness{w, dims, 1});
}

double nonlinear_trusted(const NonlinearWitnessSpec& spec, const CMatrix& rho) {
  double v = trace_real(spec.base.op * rho);
  for (std::size_t k = 0; k < spec.h.size(); ++k) {
    const double a = trace_real(spec.h[k] * rho);
    const double b = trace_real(spec.j[k] * rho);
    v -= a * a + b * b;
  }
  return v;
}

double linear_mdi(const LocalDecomposition& dec, const ProbabilityTable& table) {
  return dec.omega() * mdi_value(dec, table);
}

double linear_mdi(const Witness& w, const DensityMatrix& rho, const EveStrategy& strategy) {
  w.validate();
  if (w.copies != 1) throw Error(ErrorKind::Value, "use multicopy_mdi for multi-copy witnesses");
  if (rho.dims != w.dims) throw Error(ErrorKind::Dimension, "state and witness dimensions differ");
  return linear_mdi(decompose(w.op, w.dims), run_protocol(rho, strategy));
}

NonlinearDecomposition decompose_nonlinear(const NonlinearWitnessSpec& spec) {
  spec.base.validate();
  NonlinearDecomposition out{decompose(spec.base.op, spec.base.dims), {}, {}};
  for (const auto& h : spec.h) out.h.push_back(decompose(h, spec.base.dims));
  for (const auto& j : spec.j) out.j.push_back(decompose(j, spec.base.dims));
  return out;
}

double nonlinear_mdi(const NonlinearDecomposition& dec, const ProbabilityTable& table) {
  const double omega = dec.base.omega();
  double v = omega * mdi_value(dec.base, table);
  for (const auto& h : dec.h) {
    const double a = omega * mdi_value(h, table);
    v -= a * a;
  }
  for (const auto& j : dec.j) {
    const double b = omega * mdi_value(j, table);
    v -= b * b;
  }
  return v;
}

double nonlinear_mdi(const NonlinearWitnessSpec& spec, const DensityMatrix& rho, const EveStrategy& strategy) {
  if (rho.dims != spec.base.dims) throw Error(ErrorKind::Dimension, "state and witness dimensions differ");
  return nonlinear_mdi(decompose_nonlinear(spec), run_protocol(rho, strategy));
}

double multicopy_mdi(const LocalDecomposition& dec, const std::vector<ProbabilityTable>& tables) {
  if (tables.empty()) throw Error(ErrorKind::Value, "no tables");
  ProbabilityTable joint = tables[0];
  for (std::size_t c = 1; c < tables.size(); ++c) joint = product_table(joint, tables[c]);
  return dec.omega() * mdi_value(dec, joint);
}

double multicopy_mdi(const Witness& w, const DensityMatrix& rho, const std::vector<EveStrategy>& strategies) {
  w.validate();
  if (static_cast<int>(strategies.size()) != w.copies)
    throw Error(ErrorKind::Value, "need exactly one strategy per copy");
  if (rho.dims != w.dims) throw Error(ErrorKind::Dimension, "state and witness dimensions differ");
  std::vector<ProbabilityTable> tables;
  for (const auto& s : strategies) tables.push_back(run_protocol(rho, s));
  return multicopy_mdi(decompose(w.op, w.full_dims()), tables);
}

double bound_ftr(const CMatrix& w, double value) {
  const RVector ev = hermitian_eig(w).values;
  const double spread = ev(ev.size() - 1) - ev(0);
  if (spread <= 1e-12) throw Error(ErrorKind::Value, "witness has a single eigenvalue");
  return std::max(0.0, -value / spread);
}

double bound_fm(double value, double m) { return value < 0.0 ? m : 0.0; }

FoptResult bound_fopt(const CMatrix& w, const DimList& dims, double value, const FoptOptions& options) {
  check_operator(w, dims);
  FoptResult result;
  std::map<double, double> seen;
  const auto score = [&](double alpha) {
    auto it = seen.find(alpha);
    if (it != seen.end()) return it->second;
    const auto sol = legendre_hat(w, dims, alpha, options.solver);
    if (sol.status == SdpStatus::Infeasible) throw Error(ErrorKind::Infeasible, "Legendre program infeasible");
    const double mu_hat = std::max(sol.value, sol.dual_value);
    ++result.evaluations;
    return seen[alpha] = alpha * value - mu_hat;
  };

  std::vector<double> grid;
  for (int t = options.min_exponent; t <= options.max_exponent; ++t) {
    grid.push_back(std::ldexp(1.0, t));
    grid.push_back(-std::ldexp(1.0, t));
  }
  const RVector ev = hermitian_eig(w).values;
  const double spread = ev(ev.size() - 1) - ev(0);
  if (spread > 1e-12) grid.push_back(-1.0 / spread);

  double best_alpha = 0.0, best = 0.0;
  for (double a : grid) {
    const double s = score(a);
    if (s > best) {
      best = s;
      best_alpha = a;
    }
  }
  if (best_alpha != 0.0) {
    double factor = 2.0;
    for (int r = 0; r < options.refinements; ++r) {
      factor = std::sqrt(factor);
      const double centre = best_alpha;
      for (double a : {centre * factor, centre / factor}) {
        const double s = score(a);
        if (s > best) {
          best = s;
          best_alpha = a;
        }
      }
    }
  }
  result.bound = std::max(0.0, best);
  result.alpha = best_alpha;
  return result;
}

}  // namespace mdi
