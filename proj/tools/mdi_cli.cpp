// Scenario runner. Builds states, channels, witnesses and strategies from
// presets or matrix files, runs one scenario, and writes a JSON report plus
// CSV tables into the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mdi/decomp.hpp"
#include "mdi/fixtures.hpp"
#include "mdi/game.hpp"
#include "mdi/memory.hpp"
#include "mdi/qkd.hpp"
#include "mdi/sdp.hpp"
#include "mdi/witness.hpp"

#ifndef MDI_VERSION
#define MDI_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace mdi;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitUnconverged = 4;

struct Settings {
  std::string scenario;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out = ".";
  long long shots = 0;
  int jobs = 1;
  std::string dims = "2,2";
  std::string state = "phi+";
  std::string channel = "identity";
  std::string witness = "bell-overlap";
  std::string strategy = "faithful";
  int trials = 1;
};

std::string canonical(const Settings& s) {
  std::ostringstream os;
  os << "scenario=" << s.scenario << '\n'
     << "seed=" << (s.has_seed ? std::to_string(s.seed) : "none") << '\n'
     << "shots=" << s.shots << '\n'
     << "dims=" << s.dims << '\n'
     << "state=" << s.state << '\n'
     << "channel=" << s.channel << '\n'
     << "witness=" << s.witness << '\n'
     << "strategy=" << s.strategy << '\n'
     << "trials=" << s.trials << '\n';
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// "name(arg)" -> {name, arg}; a bare name has an empty argument.
std::pair<std::string, std::string> split_preset(const std::string& spec) {
  const auto open = spec.find('(');
  if (open == std::string::npos) return {spec, ""};
  if (spec.back() != ')') throw Error(ErrorKind::Parse, "unbalanced parentheses in '" + spec + "'");
  return {spec.substr(0, open), spec.substr(open + 1, spec.size() - open - 2)};
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Parse, "expected a number for " + what + ", got '" + text + "'");
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  if (v != static_cast<int>(v)) throw Error(ErrorKind::Parse, "expected an integer for " + what);
  return static_cast<int>(v);
}

DimList parse_dims(const std::string& text) {
  DimList dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(parse_int(item, "dims"));
  check_dims(dims);
  return dims;
}

bool is_file(const std::string& spec) { return std::filesystem::is_regular_file(spec); }

bool random_strategy(const std::string& spec) {
  const auto name = split_preset(spec).first;
  return name == "losr" || name == "separable";
}

EveStrategy make_strategy(const std::string& spec, const DimList& dims, Rng& rng) {
  const auto [name, arg] = split_preset(spec);
  if (name == "faithful") return faithful_strategy(dims);
  if (name == "trivial") return trivial_strategy(dims);
  if (name == "losr") return random_losr_strategy(dims, arg.empty() ? 2 : parse_int(arg, "losr"), rng);
  if (name == "separable") return random_separable_strategy(dims, arg.empty() ? 2 : parse_int(arg, "separable"), rng);
  throw Error(ErrorKind::Parse, "unknown strategy '" + spec + "'");
}

DensityMatrix make_state(const std::string& spec, const DimList& dims, Rng& rng) {
  if (is_file(spec)) {
    const auto [m, file_dims] = load_matrix(spec);
    return make_density(m, file_dims);
  }
  const auto [name, arg] = split_preset(spec);
  const int n = dim_product(dims);
  if (name == "mixed") return DensityMatrix{dims, identity(n) / static_cast<double>(n)};
  if (name == "product") {
    CMatrix m = CMatrix::Zero(n, n);
    m(0, 0) = 1.0;
    return DensityMatrix{dims, m};
  }
  if (name == "separable") return random_separable(dims, 4, rng).first;
  if (name == "phi+" || name == "isotropic" || name == "werner") {
    if (dims.size() != 2 || dims[0] != dims[1]) throw Error(ErrorKind::Dimension, name + " needs dims d,d");
    if (name == "phi+") return max_entangled(dims[0]);
    return isotropic_state(dims[0], parse_real(arg, name));
  }
  throw Error(ErrorKind::Parse, "unknown state '" + spec + "'");
}

bool random_state(const std::string& spec) { return !is_file(spec) && split_preset(spec).first == "separable"; }

ChoiState make_channel(const std::string& spec, int d, Rng& rng) {
  if (is_file(spec)) {
    const auto [m, file_dims] = load_matrix(spec);
    if (file_dims.size() != 2) throw Error(ErrorKind::Dimension, "channel file needs dims d_in d_out");
    return make_choi(m, file_dims[0], file_dims[1]);
  }
  const auto [name, arg] = split_preset(spec);
  if (name == "identity") return identity_channel(d);
  if (name == "depolarizing") return depolarizing_channel(d, parse_real(arg, "depolarizing"));
  if (name == "z-measure-prepare") return z_measure_prepare_channel();
  if (name == "bit-flip") return bit_flip_channel();
  if (name == "random-eb") return random_eb_channel(d, d, arg.empty() ? 2 : parse_int(arg, "random-eb"), rng);
  if (name == "constant") {
    if (arg.empty()) return constant_channel(identity(d) / static_cast<double>(d));
    const auto [m, file_dims] = load_matrix(arg);
    return constant_channel(make_density(m, file_dims).matrix);
  }
  throw Error(ErrorKind::Parse, "unknown channel '" + spec + "'");
}

bool random_channel_spec(const std::string& spec) { return !is_file(spec) && split_preset(spec).first == "random-eb"; }

struct WitnessChoice {
  Witness linear;
  std::optional<NonlinearWitnessSpec> nonlinear;
};

WitnessChoice make_witness(const std::string& spec) {
  if (is_file(spec)) {
    const auto [m, dims] = load_matrix(spec);
    Witness w{m, dims, 1};
    w.validate();
    return {w, std::nullopt};
  }
  if (spec == "transpose-nonlinear") {
    auto nl = transpose_nonlinear_spec();
    return {nl.base, nl};
  }
  try {
    return {witness_preset(spec), std::nullopt};
  } catch (const Error&) {
    throw Error(ErrorKind::Parse, "unknown witness '" + spec + "'");
  }
}

template <class F>
void parallel_for(int n, int jobs, F&& body) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  auto worker = [&] {
    for (int t = next++; t < n; t = next++) {
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(jobs, n); ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<int> unflatten(std::size_t flat, const std::vector<int>& sizes) {
  std::vector<int> idx(sizes.size());
  for (std::size_t j = sizes.size(); j-- > 0;) {
    idx[j] = static_cast<int>(flat % static_cast<std::size_t>(sizes[j]));
    flat /= static_cast<std::size_t>(sizes[j]);
  }
  return idx;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table_csv(const std::filesystem::path& path, const ProbabilityTable& t) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Value, "cannot write " + path.string());
  const std::size_t n = t.dims.size();
  for (std::size_t j = 0; j < n; ++j) os << 'k' << j + 1 << ',';
  for (std::size_t j = 0; j < n; ++j) os << 'i' << j + 1 << ',';
  os << "p\n";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto k = unflatten(r, t.input_sizes);
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const auto i = unflatten(c, t.output_sizes);
      for (int v : k) os << v << ',';
      for (int v : i) os << v << ',';
      os << fmt(t.at(r, c)) << '\n';
    }
  }
}

json table_json(const ProbabilityTable& t) {
  json entries = json::array();
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c)
      entries.push_back({{"k", unflatten(r, t.input_sizes)}, {"i", unflatten(c, t.output_sizes)}, {"p", t.at(r, c)}});
  return {{"dims", t.dims}, {"input_sizes", t.input_sizes}, {"output_sizes", t.output_sizes}, {"entries", entries}};
}

json solution_json(const SdpSolution& s) {
  return {{"status", to_string(s.status)}, {"value", s.value},           {"dual_value", s.dual_value},
          {"primal_residual", s.primal_residual}, {"dual_residual", s.dual_residual}, {"gap", s.gap},
          {"iterations", s.iterations}};
}

std::string verdict(double c) { return c < 0.0 ? "accept" : "reject"; }

class Runner {
public:
  explicit Runner(const Settings& s) : s_(s), rng_(s.seed), out_(s.out) {}

  int run(json& report) {
    if (s_.trials < 1) throw Error(ErrorKind::Parse, "trials must be positive");
    if (s_.shots < 0) throw Error(ErrorKind::Parse, "shots must be nonnegative");
    if (s_.jobs < 1) throw Error(ErrorKind::Parse, "jobs must be positive");
    std::filesystem::create_directories(out_);
    if (s_.scenario == "decompose") return decompose_scenario(report);
    if (s_.scenario == "witness") return witness_scenario(report);
    if (s_.scenario == "simulate") return simulate_scenario(report);
    if (s_.scenario == "quantify") return quantify_scenario(report);
    if (s_.scenario == "memory") return memory_scenario(report);
    if (s_.scenario == "qkd") return qkd_scenario(report);
    if (s_.scenario == "selftest") return selftest_scenario(report);
    throw Error(ErrorKind::Parse, "unknown scenario " + s_.scenario);
  }

private:
  const Settings& s_;
  Rng rng_;
  std::filesystem::path out_;

  void need_seed(bool randomized) const {
    if (randomized && !s_.has_seed) throw Error(ErrorKind::Parse, "this scenario is randomized; pass --seed");
  }

  ProbabilityTable measure(const DensityMatrix& rho, const EveStrategy& strategy, const Rng& trial_rng) const {
    const auto exact = run_protocol(rho, strategy);
    if (s_.shots == 0) return exact;
    return sample_table(exact, s_.shots, trial_rng.split(0).seed());
  }

  int decompose_scenario(json& report) {
    const auto w = make_witness(s_.witness).linear;
    const auto dec = decompose(w.op, w.full_dims());
    const double residual = (dec.reconstruct() - w.op).norm();
    report["witness"] = {{"source", s_.witness}, {"dims", w.full_dims()}};
    report["omega"] = dec.omega();
    report["gell_mann_coefficients"] = dec.gell_mann_coefficients();
    report["base_coefficients"] = dec.base();
    report["reconstruction_residual"] = residual;
    report["diagnostics"] = dec.diagnostics();
    std::ofstream os(out_ / "decompose_base.csv");
    const auto dims = w.full_dims();
    std::vector<int> sizes;
    for (int d : dims) sizes.push_back(d * d);
    for (std::size_t j = 0; j < dims.size(); ++j) os << 'k' << j + 1 << ',';
    os << "beta\n";
    for (std::size_t n = 0; n < dec.base().size(); ++n) {
      for (int v : unflatten(n, sizes)) os << v << ',';
      os << fmt(dec.base()[n]) << '\n';
    }
    return 0;
  }

  int witness_scenario(json& report) {
    const auto choice = make_witness(s_.witness);
    const auto& w = choice.linear;
    need_seed(random_strategy(s_.strategy) || random_state(s_.state) || s_.shots > 0);
    Rng state_rng = rng_.split(1u << 20);
    const auto rho = make_state(s_.state, w.dims, state_rng);
    if (rho.dims != w.dims) throw Error(ErrorKind::Dimension, "state dims do not match the witness");
    const auto dec = decompose(w.op, w.full_dims());
    std::optional<NonlinearDecomposition> ndec;
    if (choice.nonlinear) ndec = decompose_nonlinear(*choice.nonlinear);

    double trusted = 0.0;
    if (choice.nonlinear)
      trusted = nonlinear_trusted(*choice.nonlinear, rho.matrix);
    else if (w.copies == 2)
      trusted = trace_real(w.op * kron(rho.matrix, rho.matrix));
    else
      trusted = trace_real(w.op * rho.matrix);

    const int trials = random_strategy(s_.strategy) ? s_.trials : 1;
    std::vector<double> values(static_cast<std::size_t>(trials));
    std::vector<ProbabilityTable> first(1);
    parallel_for(trials, s_.jobs, [&](int t) {
      Rng r = rng_.split(static_cast<std::uint64_t>(t));
      const auto strategy = make_strategy(s_.strategy, w.dims, r);
      const auto table = measure(rho, strategy, r);
      double c = 0.0;
      if (ndec) {
        c = nonlinear_mdi(*ndec, table);
      } else if (w.copies == 2) {
        const auto second_strategy = make_strategy(s_.strategy, w.dims, r);
        c = multicopy_mdi(dec, {table, measure(rho, second_strategy, r.split(1))});
      } else {
        c = linear_mdi(dec, table);
      }
      values[static_cast<std::size_t>(t)] = c;
      if (t == 0) first[0] = table;
    });
    double worst = values[0];
    for (double v : values) worst = std::min(worst, v);
    report["witness"] = {{"source", s_.witness}, {"dims", w.full_dims()}, {"copies", w.copies}};
    report["trusted_value"] = trusted;
    report["c_mdi"] = values.size() == 1 ? json(values[0]) : json(values);
    report["c_mdi_min"] = worst;
    report["verdict"] = verdict(worst);
    write_table_csv(out_ / "witness_table.csv", first[0]);
    return 0;
  }

  int simulate_scenario(json& report) {
    const auto dims = parse_dims(s_.dims);
    need_seed(random_strategy(s_.strategy) || random_state(s_.state) || s_.shots > 0);
    Rng state_rng = rng_.split(1u << 20);
    const auto rho = make_state(s_.state, dims, state_rng);
    Rng r = rng_.split(0);
    const auto strategy = make_strategy(s_.strategy, rho.dims, r);
    const auto table = measure(rho, strategy, r);
    report["table"] = table_json(table);
    write_table_csv(out_ / "simulate_table.csv", table);
    return 0;
  }

  int quantify_scenario(json& report) {
    const auto dims = parse_dims(s_.dims);
    need_seed(random_strategy(s_.strategy) || random_state(s_.state) || s_.shots > 0);
    Rng state_rng = rng_.split(1u << 20);
    const auto rho = make_state(s_.state, dims, state_rng);
    Rng r = rng_.split(0);
    const auto strategy = make_strategy(s_.strategy, rho.dims, r);
    const auto table = measure(rho, strategy, r);
    const auto sol = mdi_quantify_state(table, default_inputs(rho.dims));
    report["sdp"] = solution_json(sol);
    report["negativity_bound"] = sol.value;
    report["trusted_negativity"] = negativity(rho.matrix, rho.dims);
    const auto w = make_witness(s_.witness).linear;
    if (w.copies == 1 && w.dims == rho.dims) {
      const double v = linear_mdi(decompose(w.op, w.dims), table);
      const auto fopt = bound_fopt(w.op, w.dims, v);
      report["witness_bounds"] = {{"witness", s_.witness}, {"c_mdi", v}, {"f_tr", bound_ftr(w.op, v)},
                                  {"f_opt", fopt.bound}, {"f_opt_alpha", fopt.alpha}};
    }
    write_table_csv(out_ / "quantify_table.csv", table);
    return sol.status == SdpStatus::Converged ? 0 : kExitUnconverged;
  }

  int memory_scenario(json& report) {
    const auto dims = parse_dims(s_.dims);
    need_seed(random_strategy(s_.strategy) || random_channel_spec(s_.channel));
    Rng channel_rng = rng_.split(1u << 20);
    const auto choi = make_channel(s_.channel, dims[0], channel_rng);
    const auto w = make_witness(s_.witness).linear;
    if (w.copies != 1 || w.dims != DimList{choi.d_in, choi.d_out})
      throw Error(ErrorKind::Dimension, "memory witness must act on (A, B')");
    const auto dec = decompose(w.op, w.dims);
    const int trials = random_strategy(s_.strategy) ? s_.trials : 1;
    std::vector<double> values(static_cast<std::size_t>(trials));
    std::vector<SdpSolution> sols(static_cast<std::size_t>(trials));
    std::vector<MemoryProtocolRun> first;
    std::mutex guard;
    parallel_for(trials, s_.jobs, [&](int t) {
      Rng r = rng_.split(static_cast<std::uint64_t>(t));
      const auto strategy = make_strategy(s_.strategy, {choi.d_out}, r);
      const auto run = run_memory_protocol(choi, strategy);
      values[static_cast<std::size_t>(t)] = memory_c_value(dec, run);
      sols[static_cast<std::size_t>(t)] = quantify_memory(run);
      if (t == 0) {
        std::lock_guard<std::mutex> lock(guard);
        first.push_back(run);
      }
    });
    bool converged = true;
    json bounds = json::array();
    double worst = values[0];
    for (std::size_t t = 0; t < sols.size(); ++t) {
      converged = converged && sols[t].status == SdpStatus::Converged;
      bounds.push_back(solution_json(sols[t]));
      worst = std::min(worst, values[t]);
    }
    report["channel"] = {{"source", s_.channel}, {"d_in", choi.d_in}, {"d_out", choi.d_out}};
    report["trusted_value"] = trace_real(w.op * choi.state.matrix);
    report["c_mdi"] = values.size() == 1 ? json(values[0]) : json(values);
    report["c_mdi_min"] = worst;
    report["verdict"] = verdict(worst);
    report["sdp"] = bounds.size() == 1 ? bounds[0] : bounds;
    const auto rob = robustness_ppt(choi);
    report["robustness_ppt"] = solution_json(rob);
    converged = converged && rob.status == SdpStatus::Converged;

    const auto& run = first.at(0);
    std::ofstream os(out_ / "memory_table.csv");
    os << "s,t,i,p\n";
    const int ns = static_cast<int>(run.inputs_a.states.size()), nt = static_cast<int>(run.inputs_b.states.size());
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < nt; ++b)
        for (int i = 0; i < run.outcomes; ++i) os << a << ',' << b << ',' << i << ',' << fmt(run.at(a, b, i)) << '\n';
    return converged ? 0 : kExitUnconverged;
  }

  int qkd_scenario(json& report) {
    need_seed(random_strategy(s_.strategy) || random_channel_spec(s_.channel));
    Rng channel_rng = rng_.split(1u << 20);
    const auto choi = make_channel(s_.channel, 2, channel_rng);
    Rng r = rng_.split(0);
    const auto strategy = make_strategy(s_.strategy, {2}, r);
    const auto table = run_qkd(choi, strategy);
    const auto reports = key_reports(table);
    json keys = json::array();
    for (const auto& k : reports) {
      json entry = {{"outcome", k.outcome}, {"aborted", k.aborted}};
      if (!k.aborted) {
        entry["e_b"] = k.rates.bit;
        entry["e_p"] = k.rates.phase;
        entry["key_rate"] = k.key_rate;
      }
      entry["bound"] = k.bound;
      keys.push_back(entry);
    }
    report["channel"] = {{"source", s_.channel}};
    report["key_reports"] = keys;
    report["aggregate_bound"] = aggregate_bound(reports);
    static const char* names[] = {"z0", "z1", "x+", "x-"};
    std::ofstream os(out_ / "qkd_table.csv");
    os << "psi,phi,a,p\n";
    for (int psi = 0; psi < 4; ++psi)
      for (int phi = 0; phi < 4; ++phi)
        for (int a = 0; a < 4; ++a) os << names[psi] << ',' << names[phi] << ',' << a << ',' << fmt(table.at(a, psi, phi)) << '\n';
    return 0;
  }

  int selftest_scenario(json& report) {
    const auto fx = check_qutrit_fixtures();
    const auto w = bell_overlap_witness(2);
    const double c = linear_mdi(w, max_entangled(2), faithful_strategy({2, 2}));
    const bool fixtures_ok = fx.checked == 18 && fx.max_forward_error <= 1e-12 && fx.max_inverse_error <= 1e-12;
    const bool game_ok = std::abs(c + 0.5) <= 1e-12;
    report["qutrit_fixtures"] = {{"checked", fx.checked},
                                 {"max_forward_error", fx.max_forward_error},
                                 {"max_inverse_error", fx.max_inverse_error},
                                 {"pass", fixtures_ok}};
    report["bell_overlap_phi_plus"] = {{"c_mdi", c}, {"pass", game_ok}};
    return fixtures_ok && game_ok ? 0 : kExitFailure;
  }
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::Value:
      return kExitParse;
    case ErrorKind::Dimension:
      return kExitDimension;
    case ErrorKind::Unconverged:
    case ErrorKind::Infeasible:
      return kExitUnconverged;
  }
  return kExitFailure;
}

void add_common(CLI::App* sub, Settings& s, bool state, bool channel, bool witness, bool strategy, bool dims,
                bool trials) {
  if (dims) sub->add_option("--dims", s.dims, "Comma-separated local dimensions")->capture_default_str();
  if (state)
    sub->add_option("--state", s.state, "phi+, mixed, product, isotropic(p), werner(p), separable or a matrix file")
        ->capture_default_str();
  if (channel)
    sub->add_option("--channel", s.channel,
                    "identity, depolarizing(p), z-measure-prepare, bit-flip, constant[(file)], random-eb(n) or a file")
        ->capture_default_str();
  if (witness)
    sub->add_option("--witness", s.witness, "bell-overlap, swap-purity, transpose-nonlinear or a matrix file")
        ->capture_default_str();
  if (strategy)
    sub->add_option("--strategy", s.strategy, "faithful, trivial, losr(n) or separable(b)")->capture_default_str();
  if (trials) sub->add_option("--trials", s.trials, "Random strategies drawn in a sweep")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Measurement-device-independent resource characterization scenarios"};
  app.set_config("--config", "", "INI file; sections name subcommands");
  app.require_subcommand(1);
  app.fallthrough();
  auto* seed = app.add_option("--seed", s.seed, "Seed for every randomized step");
  app.add_option("--out", s.out, "Output directory")->capture_default_str();
  app.add_option("--shots", s.shots, "Shots per input row; 0 uses exact probabilities")->capture_default_str();
  app.add_option("--jobs", s.jobs, "Worker threads for sweeps")->capture_default_str();

  add_common(app.add_subcommand("decompose", "Decompose a witness into local-state coefficients"), s, false, false,
             true, false, false, false);
  add_common(app.add_subcommand("witness", "Evaluate an MDI witness on a state"), s, true, false, true, true, false,
             true);
  add_common(app.add_subcommand("simulate", "Tabulate the measurement game"), s, true, false, false, true, true,
             false);
  add_common(app.add_subcommand("quantify", "Lower-bound the negativity from the game table"), s, true, false, true,
             true, true, false);
  add_common(app.add_subcommand("memory", "Characterize a channel as a quantum memory"), s, false, true, true, true,
             true, true);
  add_common(app.add_subcommand("qkd", "Run the qubit MDI-QKD protocol on a channel"), s, false, true, false, true,
             false, false);
  app.add_subcommand("selftest", "Check the qutrit reference transforms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }
  s.scenario = app.get_subcommands().front()->get_name();
  s.has_seed = seed->count() > 0;

  json report;
  report["scenario"] = s.scenario;
  report["version"] = MDI_VERSION;
  report["config_hash"] = fnv1a_hex(canonical(s));
  report["seed"] = s.has_seed ? json(s.seed) : json(nullptr);
  report["shots"] = s.shots;
  int code = 0;
  try {
    code = Runner(s).run(report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = exit_code_for(e);
    report["error"] = e.what();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kExitFailure;
    report["error"] = e.what();
  }
  report["exit_code"] = code;
  const auto path = std::filesystem::path(s.out) / (s.scenario + "_report.json");
  std::error_code ec;
  std::filesystem::create_directories(s.out, ec);
  std::ofstream os(path);
  if (!os) {
    std::cerr << "error: cannot write " << path << '\n';
    return code ? code : kExitFailure;
  }
  os << report.dump(2) << '\n';
  std::cout << path.string() << '\n';
  return code;
}
