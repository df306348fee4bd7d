#include "mdi/qkd.hpp"

#include <algorithm>
#include <cmath>

namespace mdi {

namespace {

std::size_t slot(int a, int psi, int phi) {
  if (a < 0 || a > 3 || psi < 0 || psi > 3 || phi < 0 || phi > 3)
    throw Error(ErrorKind::Dimension, "qkd table index out of range");
  return static_cast<std::size_t>((psi * 4 + phi) * 4 + a);
}

double basis_weight(const QkdTable& table, int a, int first) {
  double sum = 0.0;
  for (int psi = first; psi < first + 2; ++psi)
    for (int phi = first; phi < first + 2; ++phi) sum += table.at(a, psi, phi);
  return sum;
}

double basis_errors(const QkdTable& table, int a, int first) {
  return table.at(a, first, first + 1) + table.at(a, first + 1, first);
}

}  // namespace

LocalStateSet bb84_states() {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<CVector> kets(4, CVector::Zero(2));
  kets[0](0) = 1.0;
  kets[1](1) = 1.0;
  kets[2] << r, r;
  kets[3] << r, -r;
  LocalStateSet set{2, {}};
  for (const auto& k : kets) set.states.push_back(k * k.adjoint());
  return set;
}

double QkdTable::at(int a, Bb84 psi, Bb84 phi) const {
  return at(a, static_cast<int>(psi), static_cast<int>(phi));
}

double QkdTable::at(int a, int psi, int phi) const { return entries[slot(a, psi, phi)]; }

void QkdTable::validate(double tol) const {
  for (int psi = 0; psi < 4; ++psi)
    for (int phi = 0; phi < 4; ++phi) {
      double sum = 0.0;
      for (int a = 0; a < 4; ++a) {
        const double p = at(a, psi, phi);
        if (p < -tol || p > 1.0 + tol) throw Error(ErrorKind::Value, "qkd probability out of range");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) throw Error(ErrorKind::Value, "qkd row does not sum to one");
    }
}

QkdTable run_qkd(const ChoiState& choi, const EveStrategy& strategy) {
  if (choi.d_in != 2 || choi.d_out != 2) throw Error(ErrorKind::Dimension, "qkd needs a qubit channel");
  if (strategy_dims(strategy) != DimList{2}) throw Error(ErrorKind::Dimension, "qkd strategy must act on two qubits");
  const auto states = bb84_states();
  // The ancilla receives the transpose of each input; the BB84 states are real.
  QkdTable table;
  for (int psi = 0; psi < 4; ++psi) {
    const DensityMatrix out{{2}, channel_output(choi, states.states[static_cast<std::size_t>(psi)])};
    const auto t = run_protocol(out, {states}, strategy);
    if (t.cols() != 4) throw Error(ErrorKind::Dimension, "qkd strategy must have four outcomes");
    for (int phi = 0; phi < 4; ++phi)
      for (int a = 0; a < 4; ++a)
        table.entries[slot(a, psi, phi)] = t.at(static_cast<std::size_t>(phi), static_cast<std::size_t>(a));
  }
  return table;
}

double z_weight(const QkdTable& table, int a) { return basis_weight(table, a, 0); }

double x_weight(const QkdTable& table, int a) { return basis_weight(table, a, 2); }

std::optional<ErrorRates> error_rates(const QkdTable& table, int a, double tol) {
  const double zw = z_weight(table, a), xw = x_weight(table, a);
  if (zw <= tol || xw <= tol) return std::nullopt;
  return ErrorRates{std::clamp(basis_errors(table, a, 0) / zw, 0.0, 1.0),
                    std::clamp(basis_errors(table, a, 2) / xw, 0.0, 1.0)};
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorKind::Value, "binary entropy argument outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double key_rate(double e_b, double e_p) {
  return std::max(0.0, 1.0 - binary_entropy(e_b) - binary_entropy(e_p));
}

double key_rate(const ErrorRates& rates) { return key_rate(rates.bit, rates.phase); }

double quantumness_bound(const QkdTable& table, int a, double k_a) {
  return std::max(0.0, 0.25 * k_a * z_weight(table, a));
}

std::vector<KeyReport> key_reports(const QkdTable& table) {
  std::vector<KeyReport> out;
  for (int a = 0; a < 4; ++a) {
    KeyReport r;
    r.outcome = a;
    const auto rates = error_rates(table, a);
    if (!rates) {
      r.aborted = true;
    } else {
      r.rates = *rates;
      r.key_rate = key_rate(*rates);
      r.bound = quantumness_bound(table, a, r.key_rate);
    }
    out.push_back(r);
  }
  return out;
}

double aggregate_bound(const std::vector<KeyReport>& reports) {
  double sum = 0.0;
  for (const auto& r : reports) sum += r.bound;
  return sum;
}

}  // namespace mdi
