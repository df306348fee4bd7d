#include "mdi/decomp.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace mdi {

namespace {

constexpr double kSolveAgreementTol = 1e-9;

std::vector<int> squared(const DimList& dims) {
  std::vector<int> out;
  for (int d : dims) out.push_back(d * d);
  return out;
}

CMatrix to_complex(const RMatrix& m) { return m.cast<cplx>(); }

// M(k, r*d+c) = op_k(c, r) / scale_k, so that contracting a pair tensor
// yields tr(X op_k) / scale_k on that mode.
CMatrix trace_functionals(const std::vector<CMatrix>& ops, const std::vector<double>& scale) {
  const int d = static_cast<int>(ops[0].rows());
  CMatrix m(static_cast<int>(ops.size()), d * d);
  for (std::size_t k = 0; k < ops.size(); ++k)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(static_cast<int>(k), r * d + c) = ops[k](c, r) / scale[k];
  return m;
}

std::vector<double> real_part(const Tensor& t) {
  std::vector<double> out(t.size());
  for (std::size_t a = 0; a < t.size(); ++a) out[a] = t.data[a].real();
  return out;
}

Tensor from_real(const std::vector<int>& shape, const std::vector<double>& v) {
  return Tensor(shape, std::vector<cplx>(v.begin(), v.end()));
}

// Mode matrix that turns base coefficients into coefficients for setting i.
RMatrix setting_mode_matrix(const QuditToolkit& tk, int i) {
  const int n = tk.dim * tk.dim;
  if (i == 0) return RMatrix::Identity(n, n);
  return (tk.transforms[0].forward * tk.transforms[i].inverse).transpose();
}

void check_setting(const DimList& dims, const std::vector<int>& i) {
  if (i.size() != dims.size()) throw Error(ErrorKind::Dimension, "setting has wrong number of parties");
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (i[j] < 0 || i[j] >= dims[j] * dims[j]) throw Error(ErrorKind::Value, "setting index out of range");
}

}  // namespace

std::size_t ProbabilityTable::rows() const {
  std::size_t r = 1;
  for (int s : input_sizes) r *= static_cast<std::size_t>(s);
  return r;
}

std::size_t ProbabilityTable::cols() const {
  std::size_t c = 1;
  for (int s : output_sizes) c *= static_cast<std::size_t>(s);
  return c;
}

double ProbabilityTable::at(const std::vector<int>& k, const std::vector<int>& i) const {
  return at(flatten_index(k, input_sizes), flatten_index(i, output_sizes));
}

void ProbabilityTable::validate(double tol) const {
  if (entries.size() != rows() * cols()) throw Error(ErrorKind::Dimension, "table size mismatch");
  for (std::size_t r = 0; r < rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols(); ++c) {
      const double p = at(r, c);
      if (!(p >= -tol)) throw Error(ErrorKind::Value, "negative probability in table");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream msg;
      msg << "table row " << r << " sums to " << sum;
      throw Error(ErrorKind::Value, msg.str());
    }
  }
}

ProbabilityTable ProbabilityTable::zeros(const DimList& dims) {
  check_dims(dims);
  ProbabilityTable t;
  t.dims = dims;
  t.input_sizes = squared(dims);
  t.output_sizes = squared(dims);
  t.entries.assign(t.rows() * t.cols(), 0.0);
  return t;
}

ProbabilityTable ProbabilityTable::uniform(const DimList& dims) {
  auto t = zeros(dims);
  const double p = 1.0 / static_cast<double>(t.cols());
  for (double& e : t.entries) e = p;
  return t;
}

ProbabilityTable product_table(const ProbabilityTable& a, const ProbabilityTable& b) {
  ProbabilityTable t;
  t.dims = a.dims;
  t.dims.insert(t.dims.end(), b.dims.begin(), b.dims.end());
  t.input_sizes = a.input_sizes;
  t.input_sizes.insert(t.input_sizes.end(), b.input_sizes.begin(), b.input_sizes.end());
  t.output_sizes = a.output_sizes;
  t.output_sizes.insert(t.output_sizes.end(), b.output_sizes.begin(), b.output_sizes.end());
  t.entries.assign(t.rows() * t.cols(), 0.0);
  for (std::size_t ra = 0; ra < a.rows(); ++ra)
    for (std::size_t rb = 0; rb < b.rows(); ++rb)
      for (std::size_t ca = 0; ca < a.cols(); ++ca)
        for (std::size_t cb = 0; cb < b.cols(); ++cb)
          t.at(ra * b.rows() + rb, ca * b.cols() + cb) = a.at(ra, ca) * b.at(rb, cb);
  return t;
}

std::vector<const QuditToolkit*> toolkits_for(const DimList& dims) {
  std::vector<const QuditToolkit*> out;
  for (int d : dims) out.push_back(&qudit_toolkit(d));
  return out;
}

LocalDecomposition decompose(const CMatrix& w, const DimList& dims) {
  check_operator(w, dims);
  if (!is_hermitian(w)) throw Error(ErrorKind::Value, "observable is not Hermitian");
  const auto tks = toolkits_for(dims);

  LocalDecomposition dec;
  dec.dims_ = dims;
  dec.omega_ = 1.0;
  for (int d : dims) dec.omega_ *= static_cast<double>(d);

  const Tensor pair = to_pair_tensor(w, dims);

  Tensor gamma = pair;
  Tensor overlaps = pair;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    const auto& tk = *tks[j];
    std::vector<double> norms, ones(tk.basis.elements.size(), 1.0);
    for (std::size_t k = 0; k < tk.basis.elements.size(); ++k) norms.push_back(tk.basis.norm_sq(static_cast<int>(k)));
    gamma = gamma.apply_mode(static_cast<int>(j), trace_functionals(tk.basis.elements, norms));
    overlaps = overlaps.apply_mode(static_cast<int>(j), trace_functionals(tk.states.states, ones));
  }
  dec.gamma_ = real_part(gamma);

  Tensor beta = gamma;
  Tensor solved = overlaps;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    const auto& tk = *tks[j];
    beta = beta.apply_mode(static_cast<int>(j), to_complex(tk.shift_substitution.transpose()));
    solved = solved.apply_mode(static_cast<int>(j), to_complex(tk.states.gram().inverse()));
  }
  dec.base_ = real_part(beta);

  const auto solve = real_part(solved);
  double gap = 0.0, scale = 1.0;
  for (std::size_t a = 0; a < solve.size(); ++a) {
    gap = std::max(gap, std::abs(solve[a] - dec.base_[a]));
    scale = std::max(scale, std::abs(solve[a]));
  }
  if (gap > kSolveAgreementTol * scale) {
    std::ostringstream msg;
    msg << "shift substitution and Gram solve disagree by " << gap << "; using the solve";
    dec.diagnostics_.push_back(msg.str());
    dec.base_ = solve;
  }
  return dec;
}

std::size_t LocalDecomposition::setting_count() const {
  std::size_t n = 1;
  for (int d : dims_) n *= static_cast<std::size_t>(d * d);
  return n;
}

std::shared_ptr<const std::vector<double>> LocalDecomposition::setting(const std::vector<int>& i) const {
  check_setting(dims_, i);
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->settings.find(i);
    if (it != cache_->settings.end()) return it->second;
  }
  Tensor t = from_real(squared(dims_), base_);
  for (std::size_t j = 0; j < dims_.size(); ++j)
    t = t.apply_mode(static_cast<int>(j), to_complex(setting_mode_matrix(qudit_toolkit(dims_[j]), i[j])));
  auto value = std::make_shared<const std::vector<double>>(real_part(t));
  std::unique_lock lock(cache_->mutex);
  return cache_->settings.emplace(i, value).first->second;
}

const Tensor& LocalDecomposition::all_settings() const {
  {
    std::shared_lock lock(cache_->mutex);
    if (cache_->all) return *cache_->all;
  }
  Tensor t = from_real(squared(dims_), base_);
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    const auto& tk = qudit_toolkit(dims_[j]);
    const int n = dims_[j] * dims_[j];
    CMatrix stacked(n * n, n);
    for (int i = 0; i < n; ++i) stacked.middleRows(i * n, n) = to_complex(setting_mode_matrix(tk, i));
    t = t.apply_mode(static_cast<int>(j), stacked);
  }
  std::unique_lock lock(cache_->mutex);
  if (!cache_->all) cache_->all = std::make_shared<const Tensor>(std::move(t));
  return *cache_->all;
}

CMatrix LocalDecomposition::reconstruct() const { return reconstruct_setting(std::vector<int>(dims_.size(), 0)); }

CMatrix LocalDecomposition::reconstruct_setting(const std::vector<int>& i) const {
  const auto coeffs = setting(i);
  Tensor t = from_real(squared(dims_), *coeffs);
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    const auto& tk = qudit_toolkit(dims_[j]);
    const int d = dims_[j];
    const CMatrix& u = tk.hw.unitaries[i[j]];
    CMatrix m(d * d, d * d);
    for (int k = 0; k < d * d; ++k) {
      const CMatrix rotated = u * tk.states.states[k] * u.adjoint();
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r * d + c, k) = rotated(r, c);
    }
    t = t.apply_mode(static_cast<int>(j), m);
  }
  return from_pair_tensor(t, dims_);
}

std::vector<double> setting_coefficients(const LocalDecomposition& dec, const std::vector<int>& i) {
  return *dec.setting(i);
}

double mdi_value(const LocalDecomposition& dec, const ProbabilityTable& table) {
  const auto& dims = dec.dims();
  const auto sizes = squared(dims);
  if (table.dims != dims || table.input_sizes != sizes || table.output_sizes != sizes)
    throw Error(ErrorKind::Dimension, "probability table does not match the observable");
  if (table.entries.size() != table.rows() * table.cols())
    throw Error(ErrorKind::Dimension, "table size mismatch");

  const Tensor& all = dec.all_settings();
  const std::size_t n = dims.size();
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t j = n; j-- > 1;) stride[j - 1] = stride[j] * static_cast<std::size_t>(sizes[j]);

  std::vector<int> idx(n, 0);
  double total = 0.0;
  for (std::size_t flat = 0; flat < all.size(); ++flat) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += static_cast<std::size_t>(idx[j] % sizes[j]) * stride[j];
      col += static_cast<std::size_t>(idx[j] / sizes[j]) * stride[j];
    }
    total += all.data[flat].real() * table.at(row, col);
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < sizes[j] * sizes[j]) break;
      idx[j] = 0;
    }
  }
  return total / static_cast<double>(dec.setting_count());
}

double mdi_composite(const std::vector<double>& values, const std::vector<int>& copies, double omega,
                     const Combiner& combiner) {
  if (values.size() != copies.size()) throw Error(ErrorKind::Dimension, "values and copy counts differ in length");
  std::vector<double> scaled;
  for (std::size_t a = 0; a < values.size(); ++a) scaled.push_back(std::pow(omega, copies[a]) * values[a]);
  return combiner(scaled);
}

Combiner combiner_preset(const std::string& name) {
  if (name == "linear")
    return [](const std::vector<double>& x) {
      if (x.empty()) throw Error(ErrorKind::Value, "linear combiner needs one argument");
      return x[0];
    };
  if (name == "nonlinear-sum-of-squares")
    return [](const std::vector<double>& x) {
      if (x.empty()) throw Error(ErrorKind::Value, "sum-of-squares combiner needs arguments");
      double v = x[0];
      for (std::size_t a = 1; a < x.size(); ++a) v -= x[a] * x[a];
      return v;
    };
  if (name == "multicopy-product")
    return [](const std::vector<double>& x) {
      double v = 1.0;
      for (double e : x) v *= e;
      return v;
    };
  throw Error(ErrorKind::Value, "unknown combiner preset: " + name);
}

}  // namespace mdi
