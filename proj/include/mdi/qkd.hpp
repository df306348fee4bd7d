// Qubit MDI-QKD on a single channel: BB84 preparations on both sides, one
// untrusted joint measurement, error rates, key rate and the resulting lower
// bound on the quantumness of the channel.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mdi/game.hpp"
#include "mdi/quantum.hpp"

namespace mdi {

enum class Bb84 { Z0 = 0, Z1 = 1, XPlus = 2, XMinus = 3 };

// |0>, |1>, |+>, |-> as density matrices, in Bb84 order.
LocalStateSet bb84_states();

struct QkdTable {
  // p(a | psi, phi) at (psi * 4 + phi) * 4 + a.
  std::array<double, 64> entries{};

  double at(int a, Bb84 psi, Bb84 phi) const;
  double at(int a, int psi, int phi) const;
  void validate(double tol = 1e-9) const;
};

// p(a|psi,phi) = tr[E_a (phi (x) N(psi))] with the ancilla first.
QkdTable run_qkd(const ChoiState& choi, const EveStrategy& strategy);

struct ErrorRates {
  double bit = 0.0;
  double phase = 0.0;
};

// Sum of p(a|.,.) over the four pairs drawn from one basis.
double z_weight(const QkdTable& table, int a);
double x_weight(const QkdTable& table, int a);

// Empty when outcome a never fires in one of the bases.
std::optional<ErrorRates> error_rates(const QkdTable& table, int a, double tol = 1e-15);

double binary_entropy(double p);
// max(0, 1 - h(e_b) - h(e_p)).
double key_rate(double e_b, double e_p);
double key_rate(const ErrorRates& rates);
// K_a * z_weight / 4.
double quantumness_bound(const QkdTable& table, int a, double k_a);

struct KeyReport {
  int outcome = 0;
  bool aborted = false;
  ErrorRates rates;
  double key_rate = 0.0;
  double bound = 0.0;
};

std::vector<KeyReport> key_reports(const QkdTable& table);
// Sum of the per-outcome bounds.
double aggregate_bound(const std::vector<KeyReport>& reports);

}  // namespace mdi
