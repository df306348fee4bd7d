// Dense complex linear algebra on multipartite operators.
//
// Index convention: a multipartite basis index is flattened row-major with
// party 0 as the most significant digit. Party indices in this API are
// zero-based.

#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mdi {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using DimList = std::vector<int>;

enum class ErrorKind { Dimension, Value, Parse, Unconverged, Infeasible };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline constexpr double kHermitianTol = 1e-10;

int dim_product(const DimList& dims);
void check_dims(const DimList& dims);
void check_operator(const CMatrix& m, const DimList& dims);

CMatrix identity(int n);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(const std::vector<CMatrix>& factors);

// Operator on the parties listed in `keep` (in the order given by `dims`).
CMatrix partial_trace(const CMatrix& m, const DimList& dims, const std::vector<int>& keep);
CMatrix partial_transpose(const CMatrix& m, const DimList& dims, int party);
CMatrix partial_transpose(const CMatrix& m, const DimList& dims, const std::vector<int>& parties);

// Reorders tensor factors: factor q of the result is factor perm[q] of `m`.
CMatrix permute_subsystems(const CMatrix& m, const DimList& dims, const std::vector<int>& perm);
DimList permute_dims(const DimList& dims, const std::vector<int>& perm);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);
CMatrix hermitize(const CMatrix& m);

struct EigenSystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

EigenSystem hermitian_eig(const CMatrix& h);
double trace_norm(const CMatrix& m);
double min_eigenvalue(const CMatrix& h);
CMatrix psd_project(const CMatrix& h);
CMatrix inverse_sqrt_psd(const CMatrix& h);

// Re tr(a^dagger b)
double hs_inner(const CMatrix& a, const CMatrix& b);
double trace_real(const CMatrix& m);

void write_matrix(std::ostream& os, const CMatrix& m, const DimList& dims);
std::pair<CMatrix, DimList> read_matrix(std::istream& is);
void save_matrix(const std::string& path, const CMatrix& m, const DimList& dims);
std::pair<CMatrix, DimList> load_matrix(const std::string& path);

// Dense tensor with a complex payload. Used to apply per-party linear maps to
// operators: an operator on parties with dims (d_0..d_{n-1}) is viewed as a
// tensor whose mode j has size d_j^2 and is indexed by row_j*d_j + col_j.
struct Tensor {
  std::vector<int> shape;
  std::vector<cplx> data;

  Tensor() = default;
  Tensor(std::vector<int> shape_in, std::vector<cplx> data_in);

  std::size_t size() const { return data.size(); }

  // Contracts mode `mode` with `m`: out[..., a, ...] = sum_b m(a, b) in[..., b, ...].
  Tensor apply_mode(int mode, const CMatrix& m) const;
  Tensor permuted(const std::vector<int>& perm) const;
};

Tensor to_pair_tensor(const CMatrix& m, const DimList& dims);
CMatrix from_pair_tensor(const Tensor& t, const DimList& dims);

// Flattens per-party indices row-major (party 0 most significant).
std::size_t flatten_index(const std::vector<int>& idx, const std::vector<int>& sizes);
std::vector<int> unflatten_index(std::size_t flat, const std::vector<int>& sizes);

}  // namespace mdi
