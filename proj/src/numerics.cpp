#include "mdi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace mdi {

namespace {

std::vector<int> strides_of(const DimList& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) s[j] = s[j + 1] * dims[j + 1];
  return s;
}

void check_party(const DimList& dims, int party) {
  if (party < 0 || party >= static_cast<int>(dims.size()))
    throw Error(ErrorKind::Dimension, "party index " + std::to_string(party) + " out of range");
}

}  // namespace

int dim_product(const DimList& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

void check_dims(const DimList& dims) {
  if (dims.empty()) throw Error(ErrorKind::Dimension, "empty dimension list");
  for (int d : dims)
    if (d < 2) throw Error(ErrorKind::Dimension, "party dimension must be >= 2");
}

void check_operator(const CMatrix& m, const DimList& dims) {
  check_dims(dims);
  const int n = dim_product(dims);
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::Dimension, "operator size " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()) + " does not match dims product " +
                                          std::to_string(n));
  if (!m.allFinite()) throw Error(ErrorKind::Value, "operator has non-finite entries");
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix kron_all(const std::vector<CMatrix>& factors) {
  if (factors.empty()) return CMatrix::Ones(1, 1);
  CMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

CMatrix partial_trace(const CMatrix& m, const DimList& dims, const std::vector<int>& keep) {
  check_operator(m, dims);
  const int n = static_cast<int>(dims.size());
  std::vector<char> kept(n, 0);
  for (int p : keep) {
    check_party(dims, p);
    kept[p] = 1;
  }
  DimList kdims, tdims;
  for (int j = 0; j < n; ++j) (kept[j] ? kdims : tdims).push_back(dims[j]);
  const int kd = dim_product(kdims);
  const int td = dim_product(tdims);
  CMatrix out = CMatrix::Zero(kd, kd);
  const auto st = strides_of(dims);
  // full index from (kept index, traced index)
  std::vector<int> full(static_cast<std::size_t>(kd) * td);
  for (int a = 0; a < kd; ++a) {
    for (int t = 0; t < td; ++t) {
      int ra = a, rt = t, idx = 0;
      for (int j = n - 1; j >= 0; --j) {
        int digit;
        if (kept[j]) {
          digit = ra % dims[j];
          ra /= dims[j];
        } else {
          digit = rt % dims[j];
          rt /= dims[j];
        }
        idx += digit * st[j];
      }
      full[static_cast<std::size_t>(a) * td + t] = idx;
    }
  }
  for (int a = 0; a < kd; ++a)
    for (int b = 0; b < kd; ++b) {
      cplx s = 0.0;
      for (int t = 0; t < td; ++t)
        s += m(full[static_cast<std::size_t>(a) * td + t], full[static_cast<std::size_t>(b) * td + t]);
      out(a, b) = s;
    }
  return out;
}

CMatrix partial_transpose(const CMatrix& m, const DimList& dims, int party) {
  return partial_transpose(m, dims, std::vector<int>{party});
}

CMatrix partial_transpose(const CMatrix& m, const DimList& dims, const std::vector<int>& parties) {
  check_operator(m, dims);
  for (int p : parties) check_party(dims, p);
  const int D = dim_product(dims);
  const auto st = strides_of(dims);
  CMatrix out(D, D);
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) {
      int r2 = r, c2 = c;
      for (int p : parties) {
        const int dr = (r / st[p]) % dims[p];
        const int dc = (c / st[p]) % dims[p];
        r2 += (dc - dr) * st[p];
        c2 += (dr - dc) * st[p];
      }
      out(r2, c2) = m(r, c);
    }
  return out;
}

DimList permute_dims(const DimList& dims, const std::vector<int>& perm) {
  DimList out(perm.size());
  for (std::size_t q = 0; q < perm.size(); ++q) out[q] = dims.at(perm[q]);
  return out;
}

CMatrix permute_subsystems(const CMatrix& m, const DimList& dims, const std::vector<int>& perm) {
  check_operator(m, dims);
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) throw Error(ErrorKind::Dimension, "permutation size mismatch");
  std::vector<int> seen(n, 0);
  for (int p : perm) {
    check_party(dims, p);
    if (seen[p]++) throw Error(ErrorKind::Value, "permutation repeats a party");
  }
  const DimList odims = permute_dims(dims, perm);
  const auto ist = strides_of(dims);
  const int D = dim_product(dims);
  // map output flat index -> input flat index
  std::vector<int> map(D);
  for (int o = 0; o < D; ++o) {
    int rem = o, idx = 0;
    for (int q = n - 1; q >= 0; --q) {
      idx += (rem % odims[q]) * ist[perm[q]];
      rem /= odims[q];
    }
    map[o] = idx;
  }
  CMatrix out(D, D);
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) out(r, c) = m(map[r], map[c]);
  return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigenSystem hermitian_eig(const CMatrix& h) {
  if (!is_hermitian(h))
    throw Error(ErrorKind::Value, "hermitian_eig: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(h));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Value, "eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double trace_norm(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::Dimension, "trace_norm: matrix not square");
  if (is_hermitian(m)) return hermitian_eig(m).values.cwiseAbs().sum();
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double min_eigenvalue(const CMatrix& h) { return hermitian_eig(h).values(0); }

CMatrix psd_project(const CMatrix& h) {
  const auto es = hermitian_eig(h);
  const RVector clipped = es.values.cwiseMax(0.0);
  return es.vectors * clipped.asDiagonal() * es.vectors.adjoint();
}

CMatrix inverse_sqrt_psd(const CMatrix& h) {
  const auto es = hermitian_eig(h);
  const double top = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
  RVector inv(es.values.size());
  for (Eigen::Index k = 0; k < inv.size(); ++k) {
    if (es.values(k) <= 1e-14 * top) throw Error(ErrorKind::Value, "inverse_sqrt_psd: singular input");
    inv(k) = 1.0 / std::sqrt(es.values(k));
  }
  return es.vectors * inv.asDiagonal() * es.vectors.adjoint();
}

double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

double trace_real(const CMatrix& m) { return m.trace().real(); }

void write_matrix(std::ostream& os, const CMatrix& m, const DimList& dims) {
  check_operator(m, dims);
  os << "dims:";
  for (int d : dims) os << ' ' << d;
  os << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line.str("");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) line << ' ';
      line << m(r, c).real() << ' ' << m(r, c).imag();
    }
    os << line.str() << '\n';
  }
}

std::pair<CMatrix, DimList> read_matrix(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error(ErrorKind::Parse, "matrix text: missing header");
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "dims:") throw Error(ErrorKind::Parse, "matrix text: header must start with 'dims:'");
  DimList dims;
  int d;
  while (hs >> d) dims.push_back(d);
  if (!hs.eof()) throw Error(ErrorKind::Parse, "matrix text: malformed dims line");
  check_dims(dims);
  const int n = dim_product(dims);
  CMatrix m(n, n);
  std::string line;
  for (int r = 0; r < n; ++r) {
    do {
      if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "matrix text: too few rows");
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    std::istringstream ls(line);
    for (int c = 0; c < n; ++c) {
      double re, im;
      if (!(ls >> re >> im)) throw Error(ErrorKind::Parse, "matrix text: row " + std::to_string(r) + " too short");
      m(r, c) = cplx(re, im);
    }
    std::string extra;
    if (ls >> extra) throw Error(ErrorKind::Parse, "matrix text: row " + std::to_string(r) + " too long");
  }
  return {m, dims};
}

void save_matrix(const std::string& path, const CMatrix& m, const DimList& dims) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Parse, "cannot open " + path + " for writing");
  write_matrix(os, m, dims);
}

std::pair<CMatrix, DimList> load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Parse, "cannot open " + path);
  return read_matrix(is);
}

Tensor::Tensor(std::vector<int> shape_in, std::vector<cplx> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  if (n != data.size()) throw Error(ErrorKind::Dimension, "tensor payload does not match shape");
}

Tensor Tensor::apply_mode(int mode, const CMatrix& m) const {
  if (mode < 0 || mode >= static_cast<int>(shape.size()))
    throw Error(ErrorKind::Dimension, "tensor mode out of range");
  if (m.cols() != shape[mode]) throw Error(ErrorKind::Dimension, "mode matrix does not match tensor mode size");
  std::size_t outer = 1, inner = 1;
  for (int j = 0; j < mode; ++j) outer *= shape[j];
  for (std::size_t j = mode + 1; j < shape.size(); ++j) inner *= shape[j];
  const auto in_n = static_cast<std::size_t>(shape[mode]);
  const auto out_n = static_cast<std::size_t>(m.rows());
  Tensor out;
  out.shape = shape;
  out.shape[mode] = static_cast<int>(out_n);
  out.data.assign(outer * out_n * inner, cplx(0.0));
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMat> src(data.data() + o * in_n * inner, in_n, inner);
    Eigen::Map<RowMat> dst(out.data.data() + o * out_n * inner, out_n, inner);
    dst.noalias() = m * src;
  }
  return out;
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
  const int n = static_cast<int>(shape.size());
  if (static_cast<int>(perm.size()) != n) throw Error(ErrorKind::Dimension, "tensor permutation size mismatch");
  std::vector<int> oshape(n);
  for (int q = 0; q < n; ++q) oshape[q] = shape.at(perm[q]);
  std::vector<std::size_t> ist(n, 1);
  for (int j = n - 2; j >= 0; --j) ist[j] = ist[j + 1] * shape[j + 1];
  Tensor out;
  out.shape = oshape;
  out.data.resize(data.size());
  std::vector<int> idx(n, 0);
  for (std::size_t o = 0; o < data.size(); ++o) {
    std::size_t src = 0;
    for (int q = 0; q < n; ++q) src += idx[q] * ist[perm[q]];
    out.data[o] = data[src];
    for (int q = n - 1; q >= 0; --q) {
      if (++idx[q] < oshape[q]) break;
      idx[q] = 0;
    }
  }
  return out;
}

Tensor to_pair_tensor(const CMatrix& m, const DimList& dims) {
  check_operator(m, dims);
  const int n = static_cast<int>(dims.size());
  const auto st = strides_of(dims);
  std::vector<int> shape(n);
  for (int j = 0; j < n; ++j) shape[j] = dims[j] * dims[j];
  Tensor t;
  t.shape = shape;
  t.data.resize(static_cast<std::size_t>(m.rows()) * m.cols());
  std::vector<int> idx(n, 0);
  for (std::size_t f = 0; f < t.data.size(); ++f) {
    int r = 0, c = 0;
    for (int j = 0; j < n; ++j) {
      r += (idx[j] / dims[j]) * st[j];
      c += (idx[j] % dims[j]) * st[j];
    }
    t.data[f] = m(r, c);
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < shape[j]) break;
      idx[j] = 0;
    }
  }
  return t;
}

CMatrix from_pair_tensor(const Tensor& t, const DimList& dims) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(t.shape.size()) != n) throw Error(ErrorKind::Dimension, "pair tensor rank mismatch");
  for (int j = 0; j < n; ++j)
    if (t.shape[j] != dims[j] * dims[j]) throw Error(ErrorKind::Dimension, "pair tensor mode size mismatch");
  const auto st = strides_of(dims);
  const int D = dim_product(dims);
  CMatrix m(D, D);
  std::vector<int> idx(n, 0);
  for (std::size_t f = 0; f < t.data.size(); ++f) {
    int r = 0, c = 0;
    for (int j = 0; j < n; ++j) {
      r += (idx[j] / dims[j]) * st[j];
      c += (idx[j] % dims[j]) * st[j];
    }
    m(r, c) = t.data[f];
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < t.shape[j]) break;
      idx[j] = 0;
    }
  }
  return m;
}

std::size_t flatten_index(const std::vector<int>& idx, const std::vector<int>& sizes) {
  if (idx.size() != sizes.size()) throw Error(ErrorKind::Dimension, "multi-index rank mismatch");
  std::size_t f = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= sizes[j]) throw Error(ErrorKind::Dimension, "multi-index entry out of range");
    f = f * sizes[j] + idx[j];
  }
  return f;
}

std::vector<int> unflatten_index(std::size_t flat, const std::vector<int>& sizes) {
  std::vector<int> idx(sizes.size());
  for (int j = static_cast<int>(sizes.size()) - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat % sizes[j]);
    flat /= sizes[j];
  }
  return idx;
}

}  // namespace mdi
