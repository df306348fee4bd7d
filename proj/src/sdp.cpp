#include "mdi/sdp.hpp"

#include <cmath>
#include <numbers>

namespace mdi {

namespace {

constexpr double kDivergence = 1e12;
constexpr int kGapCheckEvery = 10;

CMatrix basis_element(int n, int j) {
  RVector e = RVector::Zero(n * n);
  e(j) = 1.0;
  return hermitian_unvec(e, n);
}

}  // namespace

RVector hermitian_vec(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  RVector v(n * n);
  int a = 0;
  for (int r = 0; r < n; ++r) v(a++) = m(r, r).real();
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) {
      v(a++) = std::numbers::sqrt2 * m(r, c).real();
      v(a++) = std::numbers::sqrt2 * m(r, c).imag();
    }
  return v;
}

CMatrix hermitian_unvec(const RVector& v, int n) {
  CMatrix m(n, n);
  int a = 0;
  for (int r = 0; r < n; ++r) m(r, r) = v(a++);
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) {
      const double re = v(a++) / std::numbers::sqrt2;
      const double im = v(a++) / std::numbers::sqrt2;
      m(r, c) = cplx(re, im);
      m(c, r) = cplx(re, -im);
    }
  return m;
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Converged: return "converged";
    case SdpStatus::Unconverged: return "unconverged";
    case SdpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

int SdpProblem::add_block(int n) {
  if (n < 1) throw Error(ErrorKind::Dimension, "block size must be positive");
  offsets_.push_back(variable_count());
  blocks_.push_back(n);
  objective_.push_back(RVector::Zero(n * n));
  return static_cast<int>(blocks_.size()) - 1;
}

int SdpProblem::variable_count() const {
  int total = 0;
  for (int n : blocks_) total += n * n;
  return total;
}

void SdpProblem::check_block(int block) const {
  if (block < 0 || block >= static_cast<int>(blocks_.size())) throw Error(ErrorKind::Value, "unknown block");
}

void SdpProblem::add_objective(int block, const CMatrix& c) {
  check_block(block);
  if (c.rows() != blocks_[block] || c.cols() != blocks_[block]) throw Error(ErrorKind::Dimension, "objective size");
  objective_[block] += hermitian_vec(hermitize(c));
}

void SdpProblem::add_scalar_constraint(const std::vector<std::pair<int, CMatrix>>& terms, double rhs) {
  Row row;
  row.rhs = rhs;
  for (const auto& [block, c] : terms) {
    check_block(block);
    if (c.rows() != blocks_[block] || c.cols() != blocks_[block]) throw Error(ErrorKind::Dimension, "constraint size");
    row.parts.emplace_back(block, hermitian_vec(hermitize(c)));
  }
  rows_.push_back(std::move(row));
}

void SdpProblem::add_map_constraint(const std::vector<std::pair<int, LinearMap>>& terms, const CMatrix& rhs) {
  const int m = static_cast<int>(rhs.rows());
  std::vector<std::pair<int, RMatrix>> images;
  for (const auto& [block, map] : terms) {
    check_block(block);
    const int n = blocks_[block];
    RMatrix img(m * m, n * n);
    for (int j = 0; j < n * n; ++j) {
      const CMatrix out = map(basis_element(n, j));
      if (out.rows() != m || out.cols() != m) throw Error(ErrorKind::Dimension, "map output size");
      img.col(j) = hermitian_vec(out);
    }
    images.emplace_back(block, std::move(img));
  }
  const RVector r = hermitian_vec(hermitize(rhs));
  for (int e = 0; e < m * m; ++e) {
    Row row;
    row.rhs = r(e);
    for (const auto& [block, img] : images) row.parts.emplace_back(block, img.row(e).transpose());
    rows_.push_back(std::move(row));
  }
}

RMatrix SdpProblem::constraint_matrix() const {
  RMatrix a = RMatrix::Zero(static_cast<Eigen::Index>(rows_.size()), variable_count());
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (const auto& [block, v] : rows_[i].parts)
      a.row(static_cast<Eigen::Index>(i)).segment(offsets_[block], v.size()) += v.transpose();
  return a;
}

RVector SdpProblem::constraint_rhs() const {
  RVector b(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) b(static_cast<Eigen::Index>(i)) = rows_[i].rhs;
  return b;
}

RVector SdpProblem::objective_vector() const {
  RVector c(variable_count());
  for (std::size_t b = 0; b < blocks_.size(); ++b) c.segment(offsets_[b], objective_[b].size()) = objective_[b];
  return c;
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  const auto& blocks = problem.blocks();
  if (blocks.empty()) throw Error(ErrorKind::Value, "problem has no blocks");
  const RMatrix a = problem.constraint_matrix();
  const RVector b = problem.constraint_rhs();
  RVector c = problem.objective_vector();
  const double sign = problem.maximize ? -1.0 : 1.0;
  c *= sign;
  const double c_norm = c.norm();
  const RVector c_unit = c_norm > 0.0 ? RVector(c / c_norm) : c;
  const int n = problem.variable_count();

  SdpSolution sol;
  RVector x0 = RVector::Zero(n);
  RMatrix q_range(n, 0);
  Eigen::ColPivHouseholderQR<RMatrix> qr_t;
  if (a.rows() > 0) {
    x0 = Eigen::CompleteOrthogonalDecomposition<RMatrix>(a).solve(b);
    if ((a * x0 - b).norm() > 1e-8 * (1.0 + b.norm())) {
      sol.status = SdpStatus::Infeasible;
      return sol;
    }
    qr_t.compute(a.transpose());
    const auto rank = qr_t.rank();
    q_range = RMatrix(qr_t.householderQ()).leftCols(rank);
  }
  const auto project_affine = [&](const RVector& v) -> RVector {
    if (q_range.cols() == 0) return v;
    return v - q_range * (q_range.transpose() * v) + x0;
  };
  std::vector<int> offsets;
  int off = 0;
  for (int nb : blocks) {
    offsets.push_back(off);
    off += nb * nb;
  }
  const auto project_cone = [&](const RVector& v) -> RVector {
    RVector out(v.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const int nb = blocks[k];
      out.segment(offsets[k], nb * nb) = hermitian_vec(psd_project(hermitian_unvec(v.segment(offsets[k], nb * nb), nb)));
    }
    return out;
  };

  const double rho = options.penalty;
  RVector z = project_cone(x0);
  RVector u = RVector::Zero(n);
  RVector x = x0;

  for (int it = 1; it <= options.max_iter; ++it) {
    x = project_affine(z - u - c_unit / rho);
    const RVector z_old = z;
    z = project_cone(x + u);
    u += x - z;
    sol.iterations = it;

    if (!u.allFinite() || u.norm() > kDivergence) {
      sol.status = SdpStatus::Infeasible;
      break;
    }
    const double scale_p = std::max({1.0, x.norm(), z.norm()});
    sol.primal_residual = (x - z).norm() / scale_p;
    const double dual_step = rho * (z - z_old).norm() / std::max(1.0, rho * u.norm());
    if (sol.primal_residual > options.tol || dual_step > options.tol) continue;
    if (it % kGapCheckEvery != 0 && it != options.max_iter) continue;

    const RVector s = -rho * u;
    RVector y = RVector::Zero(a.rows());
    if (a.rows() > 0) y = qr_t.solve(c_unit - s);
    const RVector dual_gap_vec = c_unit - a.transpose() * y - s;
    sol.dual_residual = std::max(dual_step, dual_gap_vec.norm() / (1.0 + c_unit.norm()));
    const double pv = c_unit.dot(x);
    const double dv = b.dot(y);
    sol.gap = std::abs(pv - dv) / (1.0 + std::abs(pv) + std::abs(dv));
    if (sol.dual_residual <= options.tol && sol.gap <= options.tol) {
      sol.status = SdpStatus::Converged;
      break;
    }
  }

  const RVector s = -rho * u;
  RVector y = RVector::Zero(a.rows());
  if (a.rows() > 0) y = qr_t.solve(c_unit - s);
  sol.value = sign * (c.dot(x)) + problem.constant;
  sol.dual_value = sign * c_norm * b.dot(y) + problem.constant;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    sol.blocks.push_back(hermitian_unvec(z.segment(offsets[k], blocks[k] * blocks[k]), blocks[k]));
  return sol;
}

double negativity(const CMatrix& rho, const DimList& dims, const std::vector<int>& parties) {
  return (trace_norm(partial_transpose(rho, dims, parties)) - trace_real(rho)) / 2.0;
}

namespace {

LinearMap identity_map() {
  return [](const CMatrix& x) { return x; };
}

LinearMap scaled_map(double s) {
  return [s](const CMatrix& x) { return CMatrix(s * x); };
}

LinearMap transpose_map(const DimList& dims, std::vector<int> parties) {
  return [dims, parties](const CMatrix& x) { return partial_transpose(x, dims, parties); };
}

struct NegativityBlocks {
  int rho, p, q;
};

// Adds blocks rho, P, Q with rho^Gamma = P - Q and objective
// weight * (tr P + tr Q - tr rho) / 2.
NegativityBlocks add_negativity_blocks(SdpProblem& prob, const DimList& dims, double weight) {
  const int n = dim_product(dims);
  NegativityBlocks nb{prob.add_block(n), prob.add_block(n), prob.add_block(n)};
  prob.add_objective(nb.rho, -0.5 * weight * identity(n));
  prob.add_objective(nb.p, 0.5 * weight * identity(n));
  prob.add_objective(nb.q, 0.5 * weight * identity(n));
  prob.add_map_constraint({{nb.rho, transpose_map(dims, {0})}, {nb.p, scaled_map(-1.0)}, {nb.q, identity_map()}},
                          CMatrix::Zero(n, n));
  return nb;
}

}  // namespace

SdpSolution mdi_quantify_state(const ProbabilityTable& table, const std::vector<LocalStateSet>& inputs,
                               const StateQuantifierOptions& options) {
  const DimList& dims = table.dims;
  check_dims(dims);
  if (inputs.size() != dims.size()) throw Error(ErrorKind::Dimension, "one input set per party is required");
  std::vector<int> sizes;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (inputs[j].dim != dims[j]) throw Error(ErrorKind::Dimension, "input set dimension mismatch");
    sizes.push_back(static_cast<int>(inputs[j].states.size()));
  }
  if (sizes != table.input_sizes) throw Error(ErrorKind::Dimension, "table rows do not match the input sets");
  const int n = dim_product(dims);
  const double omega = n;

  SdpProblem prob;
  std::vector<NegativityBlocks> nbs;
  for (std::size_t i = 0; i < table.cols(); ++i) nbs.push_back(add_negativity_blocks(prob, dims, 1.0 / omega));

  std::vector<std::pair<int, LinearMap>> sum_terms;
  for (const auto& nb : nbs) sum_terms.emplace_back(nb.rho, identity_map());
  prob.add_map_constraint(sum_terms, identity(n));

  if (options.without_inputs) {
    for (std::size_t i = 0; i < table.cols(); ++i) {
      double mean = 0.0;
      for (std::size_t r = 0; r < table.rows(); ++r) mean += table.at(r, i);
      mean /= static_cast<double>(table.rows());
      prob.add_scalar_constraint({{nbs[i].rho, identity(n) / omega}}, mean);
    }
  } else {
    std::vector<int> rows = options.input_subset;
    if (rows.empty())
      for (std::size_t r = 0; r < table.rows(); ++r) rows.push_back(static_cast<int>(r));
    for (int r : rows) {
      if (r < 0 || static_cast<std::size_t>(r) >= table.rows()) throw Error(ErrorKind::Value, "input index out of range");
      const auto k = unflatten_index(static_cast<std::size_t>(r), sizes);
      std::vector<CMatrix> f;
      for (std::size_t j = 0; j < dims.size(); ++j) f.push_back(inputs[j].states[k[j]].transpose());
      const CMatrix w = kron_all(f);
      for (std::size_t i = 0; i < table.cols(); ++i)
        prob.add_scalar_constraint({{nbs[i].rho, w}}, table.at(static_cast<std::size_t>(r), i));
    }
  }
  return solve(prob, options.solver);
}

SdpSolution mdi_quantify_memory(const std::vector<double>& table, const LocalStateSet& inputs_a,
                                const LocalStateSet& inputs_b, const SdpOptions& options) {
  const int da = inputs_a.dim, db = inputs_b.dim;
  const int ns = static_cast<int>(inputs_a.states.size());
  const int nt = static_cast<int>(inputs_b.states.size());
  const int outcomes = db * db;
  if (static_cast<int>(table.size()) != ns * nt * outcomes)
    throw Error(ErrorKind::Dimension, "memory table has the wrong size");
  const DimList dims{da, db};
  const int n = da * db;

  SdpProblem prob;
  std::vector<NegativityBlocks> nbs;
  for (int i = 0; i < outcomes; ++i) nbs.push_back(add_negativity_blocks(prob, dims, 1.0 / n));
  const int slack = prob.add_block(n);

  std::vector<std::pair<int, LinearMap>> sum_terms;
  for (const auto& nb : nbs) sum_terms.emplace_back(nb.rho, identity_map());
  sum_terms.emplace_back(slack, identity_map());
  prob.add_map_constraint(sum_terms, identity(n));

  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < nt; ++t) {
      const CMatrix w = kron(inputs_a.states[s].transpose(), inputs_b.states[t].transpose());
      for (int i = 0; i < outcomes; ++i)
        prob.add_scalar_constraint({{nbs[i].rho, w}}, table[static_cast<std::size_t>((s * nt + t) * outcomes + i)]);
    }
  return solve(prob, options);
}

SdpSolution robustness_ppt(const ChoiState& choi, const SdpOptions& options) {
  const DimList& dims = choi.state.dims;
  const int n = choi.state.dim();
  const CMatrix& j = choi.state.matrix;
  SdpProblem prob;
  const int nblk = prob.add_block(n);
  const int y = prob.add_block(n);
  const int z1 = prob.add_block(n);
  const int z2 = prob.add_block(n);
  prob.add_objective(nblk, identity(n));
  const auto gamma = transpose_map(dims, {1});
  prob.add_map_constraint({{y, identity_map()}, {nblk, [&](const CMatrix& x) { return CMatrix(-gamma(x)); }}},
                          CMatrix::Zero(n, n));
  prob.add_map_constraint({{z1, identity_map()}, {nblk, scaled_map(-1.0)}}, j);
  prob.add_map_constraint({{z2, identity_map()}, {nblk, [&](const CMatrix& x) { return CMatrix(-gamma(x)); }}},
                          gamma(j));
  return solve(prob, options);
}

SdpSolution legendre_hat(const CMatrix& w, const DimList& dims, double alpha, const SdpOptions& options) {
  check_operator(w, dims);
  const int n = dim_product(dims);
  SdpProblem prob;
  prob.maximize = true;
  prob.constant = 0.5;
  const int r = prob.add_block(n);
  const int p = prob.add_block(n);
  const int q = prob.add_block(n);
  prob.add_objective(r, alpha * w);
  prob.add_objective(p, -0.5 * identity(n));
  prob.add_objective(q, -0.5 * identity(n));
  prob.add_scalar_constraint({{r, identity(n)}}, 1.0);
  prob.add_map_constraint({{r, transpose_map(dims, {0})}, {p, scaled_map(-1.0)}, {q, identity_map()}},
                          CMatrix::Zero(n, n));
  return solve(prob, options);
}

}  // namespace mdi
