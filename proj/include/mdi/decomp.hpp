// Local-state decomposition of observables and MDI value evaluation.
//
// Coefficient tensors are stored flat with party 0 as the most significant
// index; each party index runs over the d_j^2 local states.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mdi/bases.hpp"
#include "mdi/numerics.hpp"

namespace mdi {

// P(i|k) keyed by a flat input index (rows) and a flat outcome index (cols).
struct ProbabilityTable {
  DimList dims;
  std::vector<int> input_sizes;
  std::vector<int> output_sizes;
  std::vector<double> entries;

  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t row, std::size_t col) { return entries[row * cols() + col]; }
  double at(std::size_t row, std::size_t col) const { return entries[row * cols() + col]; }
  double at(const std::vector<int>& k, const std::vector<int>& i) const;
  void validate(double tol = 1e-9) const;

  // Table for the game on `dims`: d_j^2 inputs and outcomes per party.
  static ProbabilityTable zeros(const DimList& dims);
  static ProbabilityTable uniform(const DimList& dims);
};

// Product table of independent experiments; parties of `a` come first.
ProbabilityTable product_table(const ProbabilityTable& a, const ProbabilityTable& b);

class LocalDecomposition {
public:
  const DimList& dims() const { return dims_; }
  double omega() const { return omega_; }
  std::size_t setting_count() const;
  std::size_t coefficient_count() const { return base_.size(); }

  // Coefficients on the product Gell-Mann basis.
  const std::vector<double>& gell_mann_coefficients() const { return gamma_; }
  // Coefficients on the product of local states tau_k.
  const std::vector<double>& base() const { return base_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  // Coefficients for the rotated states U_i tau_k U_i^dagger; cached.
  std::shared_ptr<const std::vector<double>> setting(const std::vector<int>& i) const;

  // Tensor over all settings at once: mode j has size d_j^4 and is indexed
  // by i_j * d_j^2 + k_j.
  const Tensor& all_settings() const;

  CMatrix reconstruct() const;
  CMatrix reconstruct_setting(const std::vector<int>& i) const;

private:
  friend LocalDecomposition decompose(const CMatrix& w, const DimList& dims);

  struct Cache {
    std::shared_mutex mutex;
    std::map<std::vector<int>, std::shared_ptr<const std::vector<double>>> settings;
    std::shared_ptr<const Tensor> all;
  };

  DimList dims_;
  double omega_ = 1.0;
  std::vector<double> gamma_;
  std::vector<double> base_;
  std::vector<std::string> diagnostics_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

LocalDecomposition decompose(const CMatrix& w, const DimList& dims);
std::vector<double> setting_coefficients(const LocalDecomposition& dec, const std::vector<int>& i);

// Setting-averaged contraction (1/#settings) sum_{i,k} beta^i_k P(i|k). For a
// table produced by faithful Bell measurements this equals tr(W rho)/Omega.
double mdi_value(const LocalDecomposition& dec, const ProbabilityTable& table);

using Combiner = std::function<double(const std::vector<double>&)>;

// f(Omega^{N_1} I_1, Omega^{N_2} I_2, ...). Negative means "accept".
double mdi_composite(const std::vector<double>& values, const std::vector<int>& copies, double omega,
                     const Combiner& combiner);
// "linear": first argument. "nonlinear-sum-of-squares": x_0 - sum_{k>0} x_k^2.
// "multicopy-product": product of the arguments.
Combiner combiner_preset(const std::string& name);

// Maps each party to the local-state sets used by the game (Gell-Mann states).
std::vector<const QuditToolkit*> toolkits_for(const DimList& dims);

}  // namespace mdi
