#include "mdi/game.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace mdi {

namespace {

// A weighted product of local instruments. Party j has one operator per local
// outcome a on its doubled space, and local outcome a reports labels[j][a].
struct Block {
  double weight = 1.0;
  std::vector<std::vector<CMatrix>> ops;
  std::vector<std::vector<int>> labels;
};

std::vector<int> identity_labels(int n) {
  std::vector<int> out(n);
  for (int a = 0; a < n; ++a) out[a] = a;
  return out;
}

std::vector<Block> blocks_of(const EveStrategy& strategy) {
  std::vector<Block> blocks;
  const auto from_povms = [](double w, const std::vector<Povm>& povms) {
    Block b;
    b.weight = w;
    for (const auto& p : povms) {
      b.ops.push_back(p.elements);
      b.labels.push_back(identity_labels(p.outcomes()));
    }
    return b;
  };
  if (const auto* f = std::get_if<FaithfulStrategy>(&strategy)) {
    blocks.push_back(from_povms(1.0, f->povms));
  } else if (const auto* t = std::get_if<TrivialStrategy>(&strategy)) {
    Block b;
    for (int d : t->dims) {
      const int n = d * d;
      b.ops.emplace_back(n, identity(n) / static_cast<double>(n));
      b.labels.push_back(identity_labels(n));
    }
    blocks.push_back(std::move(b));
  } else if (const auto* l = std::get_if<ProductLosrStrategy>(&strategy)) {
    for (const auto& term : l->mixture) blocks.push_back(from_povms(term.weight, term.povms));
  } else {
    const auto& s = std::get<SeparableStrategy>(strategy);
    std::vector<int> sizes;
    for (int d : s.dims) sizes.push_back(d * d);
    for (std::size_t i = 0; i < s.certificates.size(); ++i) {
      const auto label = unflatten_index(i, sizes);
      for (const auto& term : s.certificates[i]) {
        Block b;
        for (std::size_t j = 0; j < term.size(); ++j) {
          b.ops.push_back({term[j]});
          b.labels.push_back({label[j]});
        }
        blocks.push_back(std::move(b));
      }
    }
  }
  return blocks;
}

// Rows (a, k) hold the linear functional X -> tr[op_a (omega_k (x) X)] on the
// pair index r*d+c of X.
CMatrix effect_functionals(const std::vector<CMatrix>& ops, const LocalStateSet& inputs) {
  const int d = inputs.dim;
  const int nk = static_cast<int>(inputs.states.size());
  CMatrix m = CMatrix::Zero(static_cast<int>(ops.size()) * nk, d * d);
  for (std::size_t a = 0; a < ops.size(); ++a)
    for (int k = 0; k < nk; ++k) {
      const CMatrix omega = inputs.states[k].transpose();
      const int row = static_cast<int>(a) * nk + k;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          cplx v = 0.0;
          for (int ap = 0; ap < d; ++ap)
            for (int bp = 0; bp < d; ++bp) v += ops[a](ap * d + c, bp * d + r) * omega(bp, ap);
          m(row, r * d + c) = v;
        }
    }
  return m;
}

// Pair-index map X -> tr_A[op (I (x) X)] onto the ancilla.
CMatrix ancilla_map(const CMatrix& op, int d) {
  CMatrix m(d * d, d * d);
  for (int ap = 0; ap < d; ++ap)
    for (int bp = 0; bp < d; ++bp)
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(ap * d + bp, r * d + c) = op(ap * d + c, bp * d + r);
  return m;
}

// Pair-index map N -> conj(U) N U^T.
CMatrix conjugation_map(const CMatrix& u) {
  const int d = static_cast<int>(u.rows());
  CMatrix m(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int ap = 0; ap < d; ++ap)
        for (int bp = 0; bp < d; ++bp) m(a * d + b, ap * d + bp) = std::conj(u(a, ap)) * u(b, bp);
  return m;
}

void check_state_dims(const DensityMatrix& rho, const DimList& dims) {
  if (rho.dims != dims) throw Error(ErrorKind::Dimension, "state and strategy dimensions differ");
  check_operator(rho.matrix, rho.dims);
}

void check_povm_shape(const Povm& p, int d, double tol) {
  if (dim_product(p.dims) != d * d) throw Error(ErrorKind::Dimension, "local POVM must act on the doubled space");
  if (p.outcomes() != d * d) throw Error(ErrorKind::Dimension, "local POVM must have d^2 outcomes");
  p.validate(tol);
}

}  // namespace

DimList strategy_dims(const EveStrategy& strategy) {
  if (const auto* f = std::get_if<FaithfulStrategy>(&strategy)) {
    DimList dims;
    for (const auto& p : f->povms) dims.push_back(static_cast<int>(std::lround(std::sqrt(dim_product(p.dims)))));
    return dims;
  }
  if (const auto* t = std::get_if<TrivialStrategy>(&strategy)) return t->dims;
  if (const auto* l = std::get_if<ProductLosrStrategy>(&strategy)) {
    if (l->mixture.empty()) throw Error(ErrorKind::Value, "empty mixture");
    DimList dims;
    for (const auto& p : l->mixture[0].povms)
      dims.push_back(static_cast<int>(std::lround(std::sqrt(dim_product(p.dims)))));
    return dims;
  }
  return std::get<SeparableStrategy>(strategy).dims;
}

void validate_strategy(const EveStrategy& strategy, double tol) {
  const DimList dims = strategy_dims(strategy);
  check_dims(dims);
  if (const auto* f = std::get_if<FaithfulStrategy>(&strategy)) {
    for (std::size_t j = 0; j < dims.size(); ++j) check_povm_shape(f->povms[j], dims[j], tol);
  } else if (const auto* l = std::get_if<ProductLosrStrategy>(&strategy)) {
    double total = 0.0;
    for (const auto& term : l->mixture) {
      if (term.weight < 0.0) throw Error(ErrorKind::Value, "negative mixture weight");
      if (term.povms.size() != dims.size()) throw Error(ErrorKind::Dimension, "mixture term has wrong party count");
      for (std::size_t j = 0; j < dims.size(); ++j) check_povm_shape(term.povms[j], dims[j], tol);
      total += term.weight;
    }
    if (std::abs(total - 1.0) > tol) throw Error(ErrorKind::Value, "mixture weights do not sum to one");
  } else if (const auto* s = std::get_if<SeparableStrategy>(&strategy)) {
    std::size_t outcomes = 1;
    for (int d : dims) outcomes *= static_cast<std::size_t>(d * d);
    if (s->elements.size() != outcomes || s->certificates.size() != outcomes)
      throw Error(ErrorKind::Dimension, "separable POVM must have one element per joint outcome");
    const int D = static_cast<int>(outcomes);
    CMatrix sum = CMatrix::Zero(D, D);
    for (std::size_t i = 0; i < outcomes; ++i) {
      CMatrix rebuilt = CMatrix::Zero(D, D);
      for (const auto& term : s->certificates[i]) {
        if (term.size() != dims.size()) throw Error(ErrorKind::Dimension, "certificate term has wrong party count");
        for (std::size_t j = 0; j < dims.size(); ++j) {
          if (term[j].rows() != dims[j] * dims[j]) throw Error(ErrorKind::Dimension, "certificate factor has wrong size");
          if (!is_hermitian(term[j]) || min_eigenvalue(term[j]) < -tol)
            throw Error(ErrorKind::Value, "certificate factor is not positive");
        }
        rebuilt += kron_all(term);
      }
      if ((rebuilt - s->elements[i]).cwiseAbs().maxCoeff() > tol)
        throw Error(ErrorKind::Value, "certificate does not reassemble the POVM element");
      sum += s->elements[i];
    }
    if ((sum - identity(D)).cwiseAbs().maxCoeff() > tol)
      throw Error(ErrorKind::Value, "separable POVM elements do not sum to identity");
  }
}

EveStrategy faithful_strategy(const DimList& dims) {
  check_dims(dims);
  FaithfulStrategy f;
  for (int d : dims) f.povms.push_back(Povm{{d, d}, qudit_toolkit(d).bell.projectors});
  return f;
}

EveStrategy trivial_strategy(const DimList& dims) {
  check_dims(dims);
  return TrivialStrategy{dims};
}

EveStrategy random_losr_strategy(const DimList& dims, int n_components, std::uint64_t seed) {
  Rng rng(seed);
  return random_losr_strategy(dims, n_components, rng);
}

EveStrategy random_losr_strategy(const DimList& dims, int n_components, Rng& rng) {
  check_dims(dims);
  if (n_components < 1) throw Error(ErrorKind::Value, "need at least one mixture component");
  ProductLosrStrategy s;
  double total = 0.0;
  for (int m = 0; m < n_components; ++m) {
    LosrTerm term;
    term.weight = rng.exponential();
    total += term.weight;
    for (int d : dims) term.povms.push_back(random_povm(d * d, d * d, rng, rng.uniform_int(1, d * d)));
    s.mixture.push_back(std::move(term));
  }
  for (auto& term : s.mixture) term.weight /= total;
  return s;
}

EveStrategy random_separable_strategy(const DimList& dims, int branching, std::uint64_t seed) {
  Rng rng(seed);
  return random_separable_strategy(dims, branching, rng);
}

EveStrategy random_separable_strategy(const DimList& dims, int branching, Rng& rng) {
  check_dims(dims);
  if (branching < 1) throw Error(ErrorKind::Value, "branching must be positive");
  SeparableStrategy s;
  s.dims = dims;
  std::vector<int> sizes;
  for (int d : dims) sizes.push_back(d * d);
  std::size_t outcomes = 1;
  for (int n : sizes) outcomes *= static_cast<std::size_t>(n);
  s.certificates.resize(outcomes);

  std::vector<CMatrix> prefix;
  std::function<void(std::size_t)> grow = [&](std::size_t j) {
    if (j == dims.size()) {
      std::vector<int> label;
      for (int n : sizes) label.push_back(rng.uniform_int(0, n - 1));
      s.certificates[flatten_index(label, sizes)].push_back(prefix);
      return;
    }
    const int n = sizes[j];
    const Povm p = random_povm(n, branching, rng, rng.uniform_int(1, n));
    for (const auto& e : p.elements) {
      prefix.push_back(e);
      grow(j + 1);
      prefix.pop_back();
    }
  };
  grow(0);

  const int D = static_cast<int>(outcomes);
  for (const auto& terms : s.certificates) {
    CMatrix e = CMatrix::Zero(D, D);
    for (const auto& term : terms) e += kron_all(term);
    s.elements.push_back(e);
  }
  return s;
}

ProductLosrStrategy as_product_losr(const EveStrategy& strategy) {
  if (const auto* l = std::get_if<ProductLosrStrategy>(&strategy)) return *l;
  if (const auto* f = std::get_if<FaithfulStrategy>(&strategy)) return ProductLosrStrategy{{{1.0, f->povms}}};
  if (const auto* t = std::get_if<TrivialStrategy>(&strategy)) {
    LosrTerm term{1.0, {}};
    for (int d : t->dims) {
      const int n = d * d;
      term.povms.push_back(Povm{{d, d}, std::vector<CMatrix>(n, identity(n) / static_cast<double>(n))});
    }
    return ProductLosrStrategy{{term}};
  }
  throw Error(ErrorKind::Value, "separable strategy has no product mixture form");
}

std::vector<LocalStateSet> default_inputs(const DimList& dims) {
  std::vector<LocalStateSet> out;
  for (int d : dims) out.push_back(qudit_toolkit(d).states);
  return out;
}

ProbabilityTable run_protocol(const DensityMatrix& rho, const EveStrategy& strategy) {
  return run_protocol(rho, default_inputs(rho.dims), strategy);
}

ProbabilityTable run_protocol(const DensityMatrix& rho, const std::vector<LocalStateSet>& inputs,
                              const EveStrategy& strategy) {
  const DimList dims = strategy_dims(strategy);
  check_state_dims(rho, dims);
  if (inputs.size() != dims.size()) throw Error(ErrorKind::Dimension, "one input set per party is required");
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (inputs[j].dim != dims[j] || static_cast<int>(inputs[j].states.size()) != dims[j] * dims[j])
      throw Error(ErrorKind::Dimension, "input set does not match party dimension");

  auto table = ProbabilityTable::zeros(dims);
  if (std::holds_alternative<TrivialStrategy>(strategy)) return ProbabilityTable::uniform(dims);

  const std::size_t n = dims.size();
  const Tensor pair = to_pair_tensor(rho.matrix, dims);
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t j = n; j-- > 1;) stride[j - 1] = stride[j] * static_cast<std::size_t>(table.input_sizes[j]);

  for (const auto& block : blocks_of(strategy)) {
    Tensor t = pair;
    for (std::size_t j = 0; j < n; ++j) t = t.apply_mode(static_cast<int>(j), effect_functionals(block.ops[j], inputs[j]));
    std::vector<int> idx(n, 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      std::size_t row = 0, col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const int nk = table.input_sizes[j];
        row += static_cast<std::size_t>(idx[j] % nk) * stride[j];
        col += static_cast<std::size_t>(block.labels[j][idx[j] / nk]) * stride[j];
      }
      table.at(row, col) += block.weight * t.data[flat].real();
      for (std::size_t j = n; j-- > 0;) {
        if (++idx[j] < t.shape[j]) break;
        idx[j] = 0;
      }
    }
  }
  return table;
}

std::vector<CMatrix> postselected_states(const DensityMatrix& rho, const EveStrategy& strategy) {
  const DimList dims = strategy_dims(strategy);
  check_state_dims(rho, dims);
  std::vector<int> sizes;
  for (int d : dims) sizes.push_back(d * d);
  std::size_t outcomes = 1;
  for (int s : sizes) outcomes *= static_cast<std::size_t>(s);
  const int D = dim_product(dims);
  std::vector<CMatrix> out(outcomes, CMatrix::Zero(D, D));

  const std::size_t n = dims.size();
  const Tensor pair = to_pair_tensor(rho.matrix, dims);
  for (const auto& block : blocks_of(strategy)) {
    std::vector<int> counts;
    for (const auto& ops : block.ops) counts.push_back(static_cast<int>(ops.size()));
    std::size_t local = 1;
    for (int c : counts) local *= static_cast<std::size_t>(c);
    for (std::size_t flat = 0; flat < local; ++flat) {
      const auto a = unflatten_index(flat, counts);
      Tensor t = pair;
      std::vector<int> label(n);
      for (std::size_t j = 0; j < n; ++j) {
        t = t.apply_mode(static_cast<int>(j), ancilla_map(block.ops[j][a[j]], dims[j]));
        label[j] = block.labels[j][a[j]];
      }
      out[flatten_index(label, sizes)] += block.weight * from_pair_tensor(t, dims);
    }
  }
  return out;
}

DensityMatrix eve_equivalent_state(const DensityMatrix& rho, const EveStrategy& strategy) {
  const DimList dims = strategy_dims(strategy);
  check_state_dims(rho, dims);
  const std::size_t n = dims.size();
  double omega = 1.0;
  for (int d : dims) omega *= d;

  const Tensor pair = to_pair_tensor(rho.matrix, dims);
  const int D = dim_product(dims);
  CMatrix sigma = CMatrix::Zero(D, D);
  for (const auto& block : blocks_of(strategy)) {
    Tensor t = pair;
    for (std::size_t j = 0; j < n; ++j) {
      const int d = dims[j];
      const auto& hw = qudit_toolkit(d).hw;
      CMatrix k = CMatrix::Zero(d * d, d * d);
      for (std::size_t a = 0; a < block.ops[j].size(); ++a)
        k += conjugation_map(hw.unitaries[block.labels[j][a]]) * ancilla_map(block.ops[j][a], d);
      t = t.apply_mode(static_cast<int>(j), k);
    }
    sigma += block.weight * from_pair_tensor(t, dims);
  }
  return make_density(sigma / omega, dims, 1e-9);
}

ProbabilityTable sample_table(const ProbabilityTable& table, long long shots, std::uint64_t seed) {
  if (shots < 1) throw Error(ErrorKind::Value, "shots must be at least one");
  Rng rng(seed);
  ProbabilityTable out = table;
  const double total = static_cast<double>(shots);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    long long left = shots;
    double mass = 1.0;
    double assigned = 0.0;
    std::size_t last = 0;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const double p = std::max(0.0, table.at(r, c));
      long long count = 0;
      if (left > 0 && mass > 0.0) {
        std::binomial_distribution<long long> draw(left, std::clamp(p / mass, 0.0, 1.0));
        count = draw(rng.engine());
      }
      left -= count;
      mass -= p;
      out.at(r, c) = static_cast<double>(count) / total;
      if (count > 0) last = c;
      assigned += out.at(r, c);
    }
    if (left > 0) {
      out.at(r, last) += static_cast<double>(left) / total;
      assigned += static_cast<double>(left) / total;
    }
    out.at(r, last) += 1.0 - assigned;
  }
  return out;
}

}  // namespace mdi
