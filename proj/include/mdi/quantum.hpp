// States, measurements, channels and separability certificates.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mdi/numerics.hpp"
#include "mdi/rng.hpp"

namespace mdi {

struct DensityMatrix {
  DimList dims;
  CMatrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Validates PSD (min eigenvalue >= -tol) and unit trace; symmetrizes.
DensityMatrix make_density(const CMatrix& m, const DimList& dims, double tol = 1e-10);
bool is_density(const CMatrix& m, double tol = 1e-10);

// One mixture term: a product over the blocks of `partition` (each block a
// list of parties) of block states. Block states act on the block's parties
// in the listed order.
struct CertificateTerm {
  double weight = 0.0;
  std::vector<std::vector<int>> partition;
  std::vector<CMatrix> blocks;
};

struct SeparableCertificate {
  DimList dims;
  std::vector<CertificateTerm> terms;

  CMatrix assemble() const;
  // Throws unless weights are a distribution, block states are states and the
  // assembled mixture matches `state` to `tol`.
  void validate(const CMatrix& state, double tol = 1e-9) const;
};

struct Povm {
  DimList dims;
  std::vector<CMatrix> elements;

  int outcomes() const { return static_cast<int>(elements.size()); }
  void validate(double tol = 1e-9) const;
};

// Normalized Choi state (id (x) N)(Phi+) on A' (input copy, dim d_in) then B.
struct ChoiState {
  int d_in = 0;
  int d_out = 0;
  DensityMatrix state;
};

ChoiState make_choi(const CMatrix& j, int d_in, int d_out, double tol = 1e-9);

DensityMatrix max_entangled(int d);
CVector random_pure(int d, Rng& rng);
DensityMatrix random_density(int d, int rank, std::uint64_t seed);
DensityMatrix random_density(const DimList& dims, int rank, Rng& rng);
std::pair<DensityMatrix, SeparableCertificate> random_separable(const DimList& dims, int terms, std::uint64_t seed);
std::pair<DensityMatrix, SeparableCertificate> random_separable(const DimList& dims, int terms, Rng& rng);
// Mixture of `terms` pure states, each a product across a random partition of
// the parties into k blocks (entangled within blocks).
std::pair<DensityMatrix, SeparableCertificate> random_k_separable(const DimList& dims, int k, int terms, Rng& rng);
DensityMatrix isotropic_state(int d, double p);

// Random POVM on `dim` with `outcomes` elements of rank `rank` (0 = full),
// built from G G^dagger and normalized by S^{-1/2} E S^{-1/2}.
Povm random_povm(int dim, int outcomes, Rng& rng, int rank = 0);

ChoiState choi_from_kraus(const std::vector<CMatrix>& kraus);
// N(X) = d_in tr_A'[J (X^T (x) I)], linear in X.
CMatrix channel_output(const ChoiState& choi, const CMatrix& x);
DensityMatrix apply_channel(const ChoiState& choi, const DensityMatrix& rho);
// Matrix of N in the pair basis: column r*d_in+c is N(|r><c|) flattened row-major.
CMatrix channel_superoperator(const ChoiState& choi);
// Applies a product of single-party channels, one per party.
CMatrix apply_product_channel(const CMatrix& x, const DimList& dims, const std::vector<ChoiState>& channels);

struct LosrComponent {
  double weight = 0.0;
  std::vector<ChoiState> channels;  // one per party
};

std::pair<DensityMatrix, SeparableCertificate> apply_losr(const DensityMatrix& state,
                                                          const SeparableCertificate& certificate,
                                                          const std::vector<LosrComponent>& losr);

// Measure-and-prepare channel N(X) = sum_x tr(Pi_x X) sigma_x.
std::pair<ChoiState, SeparableCertificate> eb_channel_certified(const Povm& measure,
                                                                const std::vector<CMatrix>& prepare);
ChoiState eb_channel(const Povm& measure, const std::vector<CMatrix>& prepare);

ChoiState identity_channel(int d);
ChoiState depolarizing_channel(int d, double p);
ChoiState z_measure_prepare_channel();
ChoiState constant_channel(const CMatrix& sigma);
ChoiState bit_flip_channel();
ChoiState random_channel(int d_in, int d_out, int n_kraus, Rng& rng);
ChoiState random_eb_channel(int d_in, int d_out, int outcomes, Rng& rng);

}  // namespace mdi
