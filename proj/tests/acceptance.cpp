// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mdi/decomp.hpp"
#include "mdi/fixtures.hpp"
#include "mdi/game.hpp"
#include "mdi/memory.hpp"
#include "mdi/qkd.hpp"
#include "mdi/sdp.hpp"
#include "mdi/witness.hpp"

using namespace mdi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0 && secs > budget_s) {
    out.pass = false;
    out.detail += " over time budget";
  }
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %-34s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = rng.ginibre(n, n);
  return (g + g.adjoint()) / 2.0;
}

EveStrategy adversary(const DimList& dims, int t, Rng& rng) {
  if (t % 2 == 0) return random_losr_strategy(dims, rng.uniform_int(1, 3), rng);
  return random_separable_strategy(dims, 2, rng);
}

const std::vector<DimList> kConfigs{{2, 2}, {3, 3}, {2, 2, 2}};

Outcome fixtures() {
  const auto r = check_qutrit_fixtures();
  const double err = std::max(r.max_forward_error, r.max_inverse_error);
  return {r.checked == 18 && err <= 1e-12, std::to_string(r.checked) + " matrices, max error " + num(err)};
}

Outcome reconstruction() {
  Rng rng(101);
  double worst = 0.0;
  for (const auto& dims : kConfigs) {
    const int n = dim_product(dims);
    for (int t = 0; t < 100; ++t) {
      const CMatrix w = random_hermitian(n, rng);
      const double scale = std::max(1.0, w.norm());
      const auto dec = decompose(w, dims);
      worst = std::max(worst, (dec.reconstruct() - w).norm() / scale);
      for (int s = 0; s < 10; ++s) {
        std::vector<int> i;
        for (int d : dims) i.push_back(rng.uniform_int(0, d * d - 1));
        worst = std::max(worst, (dec.reconstruct_setting(i) - w).norm() / scale);
      }
    }
  }
  return {worst <= 1e-9, "max relative residual " + num(worst)};
}

Outcome completeness() {
  Rng rng(102);
  double worst = 0.0;
  for (const auto& dims : kConfigs) {
    const int n = dim_product(dims);
    const auto f = faithful_strategy(dims);
    for (int t = 0; t < 100; ++t) {
      const CMatrix w = random_hermitian(n, rng);
      const auto rho = random_density(dims, rng.uniform_int(1, n), rng);
      const double c = linear_mdi(decompose(w, dims), run_protocol(rho, f));
      worst = std::max(worst, std::abs(c - trace_real(w * rho.matrix)));
    }
  }
  return {worst <= 1e-9, "max |C - tr(W rho)| " + num(worst)};
}

Outcome soundness() {
  Rng rng(103);
  const auto bell = bell_overlap_witness(2);
  const auto bell_dec = decompose(bell.op, bell.dims);
  const auto swap = swap_witness(2, 2);
  const auto swap_dec = decompose(swap.op, swap.full_dims());
  const auto nl_dec = decompose_nonlinear(transpose_nonlinear_spec());
  double worst = 1e300;
  int trials = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto rho = random_separable({2, 2}, rng.uniform_int(1, 4), rng).first;
    const auto s = adversary({2, 2}, t, rng);
    const auto table = run_protocol(rho, s);
    const auto second = run_protocol(rho, adversary({2, 2}, t + 1, rng));
    worst = std::min({worst, linear_mdi(bell_dec, table), nonlinear_mdi(nl_dec, table),
                      multicopy_mdi(swap_dec, {table, second})});
    trials += 3;
  }
  const auto bell3 = bell_overlap_witness(3);
  const auto bell3_dec = decompose(bell3.op, bell3.dims);
  for (int t = 0; t < 100; ++t) {
    const auto rho = random_separable({3, 3}, rng.uniform_int(1, 4), rng).first;
    worst = std::min(worst, linear_mdi(bell3_dec, run_protocol(rho, adversary({3, 3}, t, rng))));
    ++trials;
  }
  return {worst >= -1e-8, std::to_string(trials) + " evaluations, min C " + num(worst)};
}

Outcome eve_state() {
  Rng rng(104);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto rho = random_density(DimList{2, 2}, rng.uniform_int(1, 4), rng);
    const EveStrategy s = t % 3 == 0 ? faithful_strategy({2, 2}) : adversary({2, 2}, t, rng);
    const CMatrix w = random_hermitian(4, rng);
    const auto dec = decompose(w, {2, 2});
    const auto sigma = eve_equivalent_state(rho, s);
    worst = std::max(worst, std::abs(dec.omega() * mdi_value(dec, run_protocol(rho, s)) -
                                     trace_real(w * sigma.matrix.transpose())));
  }
  return {worst <= 1e-9, "max deviation " + num(worst)};
}

Outcome postselection_inequality() {
  Rng rng(105);
  double worst = 1e300;
  for (int t = 0; t < 200; ++t) {
    const auto rho = random_density(DimList{2, 2}, rng.uniform_int(1, 4), rng);
    const auto s = random_losr_strategy({2, 2}, rng.uniform_int(1, 3), rng);
    double avg = 0.0;
    for (const auto& m : postselected_states(rho, s)) avg += negativity(m, {2, 2});
    worst = std::min(worst, negativity(rho.matrix, rho.dims) - avg / 4.0);
  }
  return {worst >= -1e-8, "min slack " + num(worst)};
}

Outcome multicopy() {
  const auto w = swap_witness(2, 2);
  const auto dec = decompose(w.op, w.full_dims());
  const auto f = faithful_strategy({2, 2});
  const auto value = [&](double p) {
    const auto t = run_protocol(isotropic_state(2, p), f);
    return multicopy_mdi(dec, {t, t});
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < 0.0 ? hi : lo) = mid;
  }
  const double crossing = 0.5 * (lo + hi);
  const auto phi = run_protocol(max_entangled(2), f);
  const double phi_value = multicopy_mdi(dec, {phi, phi});
  Rng rng(107);
  double worst = 1e300;
  for (int t = 0; t < 200; ++t) {
    const auto rho = random_separable({2, 2}, rng.uniform_int(1, 4), rng).first;
    worst = std::min(worst, multicopy_mdi(dec, {run_protocol(rho, adversary({2, 2}, t, rng)),
                                                run_protocol(rho, adversary({2, 2}, t + 1, rng))}));
  }
  const bool ok = std::abs(crossing - 1.0 / std::sqrt(3.0)) <= 1e-6 && std::abs(phi_value + 0.5) <= 1e-9 &&
                  worst >= -1e-8;
  return {ok, "crossing - 1/sqrt(3) " + num(crossing - 1.0 / std::sqrt(3.0)) + ", Phi+ " + num(phi_value) +
                  ", separable min " + num(worst)};
}

Outcome nonlinear() {
  const auto spec = transpose_nonlinear_spec();
  const auto dec = decompose_nonlinear(spec);
  const auto f = faithful_strategy({2, 2});
  Rng rng(108);
  int improved = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto rho = random_density(DimList{2, 2}, rng.uniform_int(1, 4), rng);
    if (trace_real(spec.base.op * rho.matrix) >= 0.0 && nonlinear_mdi(dec, run_protocol(rho, f)) < -1e-6) ++improved;
  }
  double worst = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const auto rho = random_separable({2, 2}, rng.uniform_int(1, 4), rng).first;
    const EveStrategy s = t % 3 == 0 ? f : adversary({2, 2}, t, rng);
    worst = std::min(worst, nonlinear_mdi(dec, run_protocol(rho, s)));
  }
  return {improved > 0 && worst >= -1e-8,
          std::to_string(improved) + " improved states, separable min " + num(worst)};
}

Outcome state_sdp() {
  const auto inputs = default_inputs({2, 2});
  const auto phi = mdi_quantify_state(run_protocol(max_entangled(2), faithful_strategy({2, 2})), inputs);
  const auto uniform = mdi_quantify_state(ProbabilityTable::uniform({2, 2}), inputs);
  bool ok = phi.status == SdpStatus::Converged && phi.value > 0.4 && phi.value <= 0.5 + 1e-6 &&
            uniform.status == SdpStatus::Converged && std::abs(uniform.value) <= 1e-6;
  double residual = std::max({phi.primal_residual, phi.dual_residual, uniform.primal_residual, uniform.dual_residual});
  Rng rng(109);
  double sep_max = -1e300;
  for (int t = 0; t < 5; ++t) {
    const auto rho = random_separable({2, 2}, 3, rng).first;
    const EveStrategy s = t % 2 ? faithful_strategy({2, 2}) : random_losr_strategy({2, 2}, 2, rng);
    const auto sol = mdi_quantify_state(run_protocol(rho, s), inputs);
    ok = ok && sol.status == SdpStatus::Converged;
    sep_max = std::max(sep_max, sol.value);
    residual = std::max({residual, sol.primal_residual, sol.dual_residual});
  }
  ok = ok && sep_max <= 1e-6 && residual <= 1e-7;
  return {ok, "Phi+ " + num(phi.value) + ", uniform " + num(uniform.value) + ", separable max " + num(sep_max) +
                  ", residual " + num(residual)};
}

Outcome memory() {
  const auto id = quantify_memory(run_memory_protocol(identity_channel(2), faithful_strategy({2})));
  bool ok = id.status == SdpStatus::Converged && id.value > 0.4;
  const auto w = bell_overlap_witness(2);
  const auto dec = decompose(w.op, w.dims);
  const std::vector<ChoiState> eb{z_measure_prepare_channel(), constant_channel(identity(2) / 2.0),
                                  depolarizing_channel(2, 1.0), depolarizing_channel(2, 0.7)};
  Rng rng(110);
  double sdp_max = -1e300, value_min = 1e300;
  for (const auto& ch : eb) {
    const auto sol = quantify_memory(run_memory_protocol(ch, faithful_strategy({2})));
    ok = ok && sol.status == SdpStatus::Converged;
    sdp_max = std::max(sdp_max, sol.value);
    for (int t = 0; t < 50; ++t)
      value_min = std::min(value_min, memory_c_value(dec, run_memory_protocol(ch, adversary({2}, t, rng))));
  }
  double projection = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto ch = random_channel(2, 2, rng.uniform_int(1, 4), rng);
    const auto run = run_memory_protocol(ch, faithful_strategy({2}));
    const auto bip = run_protocol(ch.state, faithful_strategy({2, 2}));
    for (int s = 0; s < 4; ++s)
      for (int u = 0; u < 4; ++u)
        for (int i = 0; i < 4; ++i) projection = std::max(projection, std::abs(run.at(s, u, i) - 4.0 * bip.at({s, u}, {0, i})));
    const CMatrix wr = random_hermitian(4, rng);
    projection =
        std::max(projection, std::abs(memory_c_value(decompose(wr, {2, 2}), run) - trace_real(wr * ch.state.matrix)));
  }
  ok = ok && sdp_max <= 1e-6 && value_min >= -1e-8 && projection <= 1e-10;
  return {ok, "identity " + num(id.value) + ", EB SDP max " + num(sdp_max) + ", EB value min " + num(value_min) +
                  ", projection " + num(projection)};
}

// Smallest s on a grid such that (Phi+ + s M)/(1+s) is PPT for some
// separable isotropic M = F Phi+ + (1-F)(I-Phi+)/3 with F <= 1/2.
double isotropic_brute_force() {
  const CMatrix phi = max_entangled(2).matrix;
  const CMatrix perp = (identity(4) - phi) / 3.0;
  for (int k = 0; k <= 30000; ++k) {
    const double s = k * 1e-4;
    for (int m = 0; m <= 50; ++m) {
      const double fm = 0.5 * m / 50.0;
      const CMatrix mix = (phi + s * (fm * phi + (1.0 - fm) * perp)) / (1.0 + s);
      if (min_eigenvalue(partial_transpose(mix, {2, 2}, 1)) >= -1e-12) return s;
    }
  }
  return -1.0;
}

Outcome robustness() {
  const auto phi = robustness_ppt(identity_channel(2));
  const double brute = isotropic_brute_force();
  double eb_max = -1e300;
  bool converged = phi.status == SdpStatus::Converged;
  for (const auto& ch : {z_measure_prepare_channel(), depolarizing_channel(2, 1.0), constant_channel(identity(2) / 2.0)}) {
    const auto sol = robustness_ppt(ch);
    converged = converged && sol.status == SdpStatus::Converged;
    eb_max = std::max(eb_max, sol.value);
  }
  const bool ok = converged && std::abs(phi.value - 0.5) <= 1e-4 && eb_max <= 1e-6;
  return {ok, "Phi+ solver " + num(phi.value) + " (target 0.5), isotropic brute force " + num(brute) + ", EB max " +
                  num(eb_max)};
}

Outcome qkd() {
  const auto f = faithful_strategy({2});
  const auto id_table = run_qkd(identity_channel(2), f);
  const auto id_rates = error_rates(id_table, 0);
  const auto id_report = key_reports(id_table)[0];
  const auto zmp = key_reports(run_qkd(z_measure_prepare_channel(), f))[0];
  const auto flip = error_rates(run_qkd(bit_flip_channel(), f), 0);
  bool ok = id_rates && std::abs(id_rates->bit) <= 1e-12 && std::abs(id_rates->phase) <= 1e-12 &&
            std::abs(id_report.key_rate - 1.0) <= 1e-12 && std::abs(id_report.bound - 0.25) <= 1e-9 &&
            zmp.bound == 0.0 && flip && std::abs(flip->bit - 1.0) <= 1e-12 && std::abs(flip->phase) <= 1e-12;
  Rng rng(112);
  const std::vector<ChoiState> presets{identity_channel(2), depolarizing_channel(2, 0.3), z_measure_prepare_channel(),
                                       bit_flip_channel(), constant_channel(identity(2) / 2.0)};
  double gap = 0.0;
  for (const auto& ch : presets)
    for (int t = 0; t < 20; ++t) {
      const auto table = run_qkd(ch, adversary({2}, t, rng));
      for (int a = 0; a < 4; ++a) gap = std::max(gap, std::abs(z_weight(table, a) - x_weight(table, a)));
    }
  ok = ok && gap <= 1e-9;
  return {ok, "identity bound " + num(id_report.bound) + ", z-measure bound " + num(zmp.bound) + ", bit-flip e_b " +
                  num(flip ? flip->bit : -1.0) + ", X/Z gap " + num(gap)};
}

Outcome negativity_and_fopt() {
  Rng rng(113);
  double transpose_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto rho = random_density(DimList{2, 2}, rng.uniform_int(1, 4), rng);
    transpose_gap = std::max(transpose_gap, std::abs(negativity(rho.matrix, rho.dims) -
                                                     negativity(rho.matrix.transpose(), rho.dims)));
  }
  double slack = 1e300;
  for (int t = 0; t < 50; ++t) {
    // Partial transposes of rank-one projectors are witnesses; adding a
    // positive operator keeps them witnesses.
    const CVector v = random_pure(4, rng);
    CMatrix w = partial_transpose(v * v.adjoint(), {2, 2}, 0);
    if (t % 2 == 1) w += 0.3 * random_density(DimList{2, 2}, 2, rng).matrix;
    const auto eig = hermitian_eig(w);
    const double lo = eig.values.minCoeff(), hi = eig.values.maxCoeff();
    const double value = lo + (hi - lo) * 0.5 * rng.uniform();
    slack = std::min(slack, bound_fopt(w, {2, 2}, value).bound - bound_ftr(w, value));
  }
  return {transpose_gap <= 1e-10 && slack >= -1e-8,
          "transpose gap " + num(transpose_gap) + ", min f_opt - f_tr " + num(slack)};
}

}  // namespace

int main() {
  criterion(1, "qutrit reference transforms", 1.0, fixtures);
  criterion(2, "decomposition reconstruction", 30.0, reconstruction);
  criterion(3, "completeness", 60.0, completeness);
  criterion(4, "soundness", 300.0, soundness);
  criterion(5, "equivalent state identity", 0.0, eve_state);
  criterion(6, "postselection inequality", 0.0, postselection_inequality);
  criterion(7, "multicopy witness", 0.0, multicopy);
  criterion(8, "nonlinear witness", 0.0, nonlinear);
  criterion(9, "state quantifier", 300.0, state_sdp);
  criterion(10, "memory", 0.0, memory);
  criterion(11, "robustness", 0.0, robustness);
  criterion(12, "qkd", 0.0, qkd);
  criterion(13, "negativity and f_opt", 0.0, negativity_and_fopt);
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
