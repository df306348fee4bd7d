#include "mdi/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdi {

namespace {

DimList block_dims(const DimList& dims, const std::vector<int>& block) {
  DimList out;
  for (int p : block) out.push_back(dims.at(p));
  return out;
}

CMatrix assemble_term(const DimList& dims, const CertificateTerm& term) {
  std::vector<int> order;
  for (const auto& block : term.partition) order.insert(order.end(), block.begin(), block.end());
  const CMatrix prod = kron_all(term.blocks);
  std::vector<int> perm(order.size());
  for (std::size_t q = 0; q < order.size(); ++q) {
    const auto it = std::find(order.begin(), order.end(), static_cast<int>(q));
    perm[q] = static_cast<int>(it - order.begin());
  }
  return permute_subsystems(prod, permute_dims(dims, order), perm);
}

std::vector<double> dirichlet_weights(int n, Rng& rng) {
  std::vector<double> w(n);
  for (auto& x : w) x = rng.exponential();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace

bool is_density(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || !is_hermitian(m)) return false;
  if (std::abs(m.trace().real() - 1.0) > tol) return false;
  return min_eigenvalue(m) >= -tol;
}

DensityMatrix make_density(const CMatrix& m, const DimList& dims, double tol) {
  check_operator(m, dims);
  if (!is_hermitian(m)) throw Error(ErrorKind::Value, "density matrix is not Hermitian");
  const CMatrix h = hermitize(m);
  if (std::abs(h.trace().real() - 1.0) > tol) throw Error(ErrorKind::Value, "density matrix trace is not 1");
  if (min_eigenvalue(h) < -tol) throw Error(ErrorKind::Value, "density matrix is not positive semidefinite");
  return {dims, h};
}

CMatrix SeparableCertificate::assemble() const {
  const int D = dim_product(dims);
  CMatrix out = CMatrix::Zero(D, D);
  for (const auto& t : terms) out += t.weight * assemble_term(dims, t);
  return out;
}

void SeparableCertificate::validate(const CMatrix& state, double tol) const {
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.weight < -1e-12) throw Error(ErrorKind::Value, "certificate weight is negative");
    total += t.weight;
    std::vector<int> seen(dims.size(), 0);
    if (t.partition.size() != t.blocks.size()) throw Error(ErrorKind::Value, "certificate block count mismatch");
    for (std::size_t b = 0; b < t.partition.size(); ++b) {
      for (int p : t.partition[b]) {
        if (p < 0 || p >= static_cast<int>(dims.size()) || seen[p]++)
          throw Error(ErrorKind::Value, "certificate partition is not a partition of the parties");
      }
      const int bd = dim_product(block_dims(dims, t.partition[b]));
      if (t.blocks[b].rows() != bd || !is_density(t.blocks[b], tol))
        throw Error(ErrorKind::Value, "certificate block is not a state of the right size");
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw Error(ErrorKind::Value, "certificate partition misses a party");
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error(ErrorKind::Value, "certificate weights do not sum to 1");
  if ((assemble() - state).norm() > tol) throw Error(ErrorKind::Value, "certificate does not reassemble the state");
}

void Povm::validate(double tol) const {
  if (elements.empty()) throw Error(ErrorKind::Value, "POVM has no elements");
  const int D = dim_product(dims);
  CMatrix sum = CMatrix::Zero(D, D);
  for (const auto& e : elements) {
    check_operator(e, dims);
    if (!is_hermitian(e)) throw Error(ErrorKind::Value, "POVM element is not Hermitian");
    if (min_eigenvalue(e) < -1e-10) throw Error(ErrorKind::Value, "POVM element is not positive semidefinite");
    sum += e;
  }
  if ((sum - identity(D)).norm() > tol) throw Error(ErrorKind::Value, "POVM elements do not sum to identity");
}

ChoiState make_choi(const CMatrix& j, int d_in, int d_out, double tol) {
  ChoiState c;
  c.d_in = d_in;
  c.d_out = d_out;
  c.state = make_density(j, {d_in, d_out});
  const CMatrix marginal = partial_trace(c.state.matrix, c.state.dims, {0});
  if ((marginal - identity(d_in) / static_cast<double>(d_in)).norm() > tol)
    throw Error(ErrorKind::Value, "Choi state marginal is not maximally mixed (channel not trace preserving)");
  return c;
}

DensityMatrix max_entangled(int d) {
  if (d < 2) throw Error(ErrorKind::Dimension, "max_entangled: d must be >= 2");
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) m(j * d + j, k * d + k) = 1.0 / d;
  return {{d, d}, m};
}

CVector random_pure(int d, Rng& rng) {
  CVector v(d);
  for (int k = 0; k < d; ++k) v(k) = rng.complex_normal();
  return v / v.norm();
}

DensityMatrix random_density(const DimList& dims, int rank, Rng& rng) {
  check_dims(dims);
  const int D = dim_product(dims);
  if (rank < 1 || rank > D) throw Error(ErrorKind::Value, "random_density: rank out of range");
  const CMatrix g = rng.ginibre(D, rank);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return {dims, hermitize(m)};
}

DensityMatrix random_density(int d, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(DimList{d}, rank, rng);
}

std::pair<DensityMatrix, SeparableCertificate> random_separable(const DimList& dims, int terms, std::uint64_t seed) {
  Rng rng(seed);
  return random_separable(dims, terms, rng);
}

std::pair<DensityMatrix, SeparableCertificate> random_separable(const DimList& dims, int terms, Rng& rng) {
  check_dims(dims);
  if (terms < 1) throw Error(ErrorKind::Value, "random_separable: terms must be >= 1");
  SeparableCertificate cert;
  cert.dims = dims;
  const auto w = dirichlet_weights(terms, rng);
  for (int t = 0; t < terms; ++t) {
    CertificateTerm term;
    term.weight = w[t];
    for (std::size_t p = 0; p < dims.size(); ++p) {
      term.partition.push_back({static_cast<int>(p)});
      const CVector v = random_pure(dims[p], rng);
      term.blocks.push_back(v * v.adjoint());
    }
    cert.terms.push_back(std::move(term));
  }
  return {{dims, hermitize(cert.assemble())}, cert};
}

std::pair<DensityMatrix, SeparableCertificate> random_k_separable(const DimList& dims, int k, int terms, Rng& rng) {
  check_dims(dims);
  const int n = static_cast<int>(dims.size());
  if (k < 1 || k > n) throw Error(ErrorKind::Value, "random_k_separable: k out of range");
  if (terms < 1) throw Error(ErrorKind::Value, "random_k_separable: terms must be >= 1");
  SeparableCertificate cert;
  cert.dims = dims;
  const auto w = dirichlet_weights(terms, rng);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<int> label(n);
    for (int q = 0; q < n; ++q) label[order[q]] = q < k ? q : rng.uniform_int(0, k - 1);
    CertificateTerm term;
    term.weight = w[t];
    term.partition.assign(k, {});
    for (int p = 0; p < n; ++p) term.partition[label[p]].push_back(p);
    for (const auto& block : term.partition) {
      const CVector v = random_pure(dim_product(block_dims(dims, block)), rng);
      term.blocks.push_back(v * v.adjoint());
    }
    cert.terms.push_back(std::move(term));
  }
  return {{dims, hermitize(cert.assemble())}, cert};
}

DensityMatrix isotropic_state(int d, double p) {
  DensityMatrix phi = max_entangled(d);
  phi.matrix = p * phi.matrix + (1.0 - p) * identity(d * d) / static_cast<double>(d * d);
  return phi;
}

Povm random_povm(int dim, int outcomes, Rng& rng, int rank) {
  if (outcomes < 1) throw Error(ErrorKind::Value, "random_povm: need at least one outcome");
  if (rank <= 0 || rank > dim) rank = dim;
  rank = std::max(rank, (dim + outcomes - 1) / outcomes);
  Povm p;
  p.dims = {dim};
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (int a = 0; a < outcomes; ++a) {
    const CMatrix g = rng.ginibre(dim, rank);
    p.elements.push_back(g * g.adjoint());
    sum += p.elements.back();
  }
  const CMatrix s = inverse_sqrt_psd(sum);
  for (auto& e : p.elements) e = hermitize(s * e * s);
  return p;
}

ChoiState choi_from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw Error(ErrorKind::Value, "choi_from_kraus: empty Kraus list");
  const int d_in = static_cast<int>(kraus[0].cols());
  const int d_out = static_cast<int>(kraus[0].rows());
  CMatrix tp = CMatrix::Zero(d_in, d_in);
  for (const auto& k : kraus) {
    if (k.cols() != d_in || k.rows() != d_out) throw Error(ErrorKind::Dimension, "Kraus operators differ in shape");
    tp += k.adjoint() * k;
  }
  if ((tp - identity(d_in)).norm() > 1e-9) throw Error(ErrorKind::Value, "Kraus operators are not trace preserving");
  CVector omega = CVector::Zero(d_in * d_in);
  for (int j = 0; j < d_in; ++j) omega(j * d_in + j) = 1.0;
  CMatrix j = CMatrix::Zero(d_in * d_out, d_in * d_out);
  for (const auto& k : kraus) {
    const CVector v = kron(identity(d_in), k) * omega;
    j += v * v.adjoint();
  }
  return make_choi(j / static_cast<double>(d_in), d_in, d_out);
}

CMatrix channel_output(const ChoiState& choi, const CMatrix& x) {
  if (x.rows() != choi.d_in || x.cols() != choi.d_in)
    throw Error(ErrorKind::Dimension, "channel input has the wrong dimension");
  const CMatrix prod = choi.state.matrix * kron(x.transpose(), identity(choi.d_out));
  return static_cast<double>(choi.d_in) * partial_trace(prod, {choi.d_in, choi.d_out}, {1});
}

DensityMatrix apply_channel(const ChoiState& choi, const DensityMatrix& rho) {
  return make_density(channel_output(choi, rho.matrix), {choi.d_out});
}

CMatrix channel_superoperator(const ChoiState& choi) {
  const int di = choi.d_in, dout = choi.d_out;
  CMatrix s(dout * dout, di * di);
  for (int r = 0; r < di; ++r)
    for (int c = 0; c < di; ++c) {
      CMatrix e = CMatrix::Zero(di, di);
      e(r, c) = 1.0;
      const CMatrix img = channel_output(choi, e);
      for (int a = 0; a < dout; ++a)
        for (int b = 0; b < dout; ++b) s(a * dout + b, r * di + c) = img(a, b);
    }
  return s;
}

CMatrix apply_product_channel(const CMatrix& x, const DimList& dims, const std::vector<ChoiState>& channels) {
  if (channels.size() != dims.size()) throw Error(ErrorKind::Dimension, "one channel per party required");
  Tensor t = to_pair_tensor(x, dims);
  DimList out_dims;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (channels[j].d_in != dims[j]) throw Error(ErrorKind::Dimension, "channel input dim does not match party");
    t = t.apply_mode(static_cast<int>(j), channel_superoperator(channels[j]));
    out_dims.push_back(channels[j].d_out);
  }
  return from_pair_tensor(t, out_dims);
}

std::pair<DensityMatrix, SeparableCertificate> apply_losr(const DensityMatrix& state,
                                                          const SeparableCertificate& certificate,
                                                          const std::vector<LosrComponent>& losr) {
  if (losr.empty()) throw Error(ErrorKind::Value, "apply_losr: empty operation");
  const DimList& dims = state.dims;
  DimList out_dims;
  for (const auto& ch : losr.front().channels) out_dims.push_back(ch.d_out);
  if (losr.front().channels.size() != dims.size()) throw Error(ErrorKind::Dimension, "apply_losr: channel count");
  const int D = dim_product(out_dims);
  CMatrix out = CMatrix::Zero(D, D);
  SeparableCertificate cert;
  cert.dims = out_dims;
  for (const auto& comp : losr) {
    for (std::size_t j = 0; j < dims.size(); ++j)
      if (comp.channels.at(j).d_out != out_dims[j]) throw Error(ErrorKind::Dimension, "apply_losr: output dims differ");
    out += comp.weight * apply_product_channel(state.matrix, dims, comp.channels);
    for (const auto& term : certificate.terms) {
      CertificateTerm nt;
      nt.weight = term.weight * comp.weight;
      nt.partition = term.partition;
      for (std::size_t b = 0; b < term.partition.size(); ++b) {
        std::vector<ChoiState> chans;
        for (int p : term.partition[b]) chans.push_back(comp.channels[p]);
        nt.blocks.push_back(hermitize(apply_product_channel(term.blocks[b], block_dims(dims, term.partition[b]), chans)));
      }
      cert.terms.push_back(std::move(nt));
    }
  }
  DensityMatrix result = make_density(out, out_dims, 1e-9);
  cert.validate(result.matrix);
  return {result, cert};
}

std::pair<ChoiState, SeparableCertificate> eb_channel_certified(const Povm& measure,
                                                                const std::vector<CMatrix>& prepare) {
  measure.validate();
  if (measure.dims.size() != 1) throw Error(ErrorKind::Dimension, "eb_channel: single-party POVM required");
  if (prepare.size() != measure.elements.size())
    throw Error(ErrorKind::Value, "eb_channel: POVM element count differs from prepared-state count");
  const int di = measure.dims[0];
  const int dout = static_cast<int>(prepare[0].rows());
  CMatrix j = CMatrix::Zero(di * dout, di * dout);
  SeparableCertificate cert;
  cert.dims = {di, dout};
  for (std::size_t x = 0; x < prepare.size(); ++x) {
    if (!is_density(prepare[x]) || prepare[x].rows() != dout)
      throw Error(ErrorKind::Value, "eb_channel: prepared operators must be states of a common dimension");
    const CMatrix a = measure.elements[x].transpose() / static_cast<double>(di);
    j += kron(a, prepare[x]);
    const double w = a.trace().real();
    if (w > 1e-15) cert.terms.push_back({w, {{0}, {1}}, {hermitize(a / w), prepare[x]}});
  }
  double tot = 0.0;
  for (const auto& t : cert.terms) tot += t.weight;
  for (auto& t : cert.terms) t.weight /= tot;
  ChoiState choi = make_choi(j, di, dout);
  cert.validate(choi.state.matrix);
  return {choi, cert};
}

ChoiState eb_channel(const Povm& measure, const std::vector<CMatrix>& prepare) {
  return eb_channel_certified(measure, prepare).first;
}

ChoiState identity_channel(int d) { return make_choi(max_entangled(d).matrix, d, d); }

ChoiState depolarizing_channel(int d, double p) {
  if (p < 0.0 || p > 1.0 + 1.0 / (d * d - 1.0)) throw Error(ErrorKind::Value, "depolarizing: p out of range");
  const CMatrix j = (1.0 - p) * max_entangled(d).matrix + p * identity(d * d) / static_cast<double>(d * d);
  return make_choi(j, d, d);
}

ChoiState z_measure_prepare_channel() {
  Povm z;
  z.dims = {2};
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  z.elements = {p0, p1};
  return eb_channel(z, {p0, p1});
}

ChoiState constant_channel(const CMatrix& sigma) {
  Povm trivial;
  trivial.dims = {static_cast<int>(sigma.rows())};
  trivial.elements = {identity(static_cast<int>(sigma.rows()))};
  return eb_channel(trivial, {sigma});
}

ChoiState bit_flip_channel() {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return choi_from_kraus({x});
}

ChoiState random_channel(int d_in, int d_out, int n_kraus, Rng& rng) {
  if (d_out * n_kraus < d_in) throw Error(ErrorKind::Value, "random_channel: too few Kraus operators");
  const CMatrix g = rng.ginibre(d_out * n_kraus, d_in);
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix v = qr.householderQ() * CMatrix::Identity(d_out * n_kraus, d_in);
  std::vector<CMatrix> kraus;
  for (int a = 0; a < n_kraus; ++a) kraus.push_back(v.block(a * d_out, 0, d_out, d_in));
  return choi_from_kraus(kraus);
}

ChoiState random_eb_channel(int d_in, int d_out, int outcomes, Rng& rng) {
  const Povm m = random_povm(d_in, outcomes, rng, rng.uniform_int(1, d_in));
  std::vector<CMatrix> prep;
  for (int x = 0; x < outcomes; ++x) prep.push_back(random_density(DimList{d_out}, rng.uniform_int(1, d_out), rng).matrix);
  return eb_channel(m, prep);
}

}  // namespace mdi
