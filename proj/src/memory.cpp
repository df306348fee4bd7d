#include "mdi/memory.hpp"

#include <cmath>

namespace mdi {

namespace {

bool same_states(const LocalStateSet& a, const LocalStateSet& b) {
  if (a.dim != b.dim || a.states.size() != b.states.size()) return false;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    if ((a.states[k] - b.states[k]).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

}  // namespace

double MemoryProtocolRun::at(int s, int t, int i) const {
  const int nt = static_cast<int>(inputs_b.states.size());
  return table.at(static_cast<std::size_t>((s * nt + t) * outcomes + i));
}

void MemoryProtocolRun::validate(double tol) const {
  const int ns = static_cast<int>(inputs_a.states.size());
  const int nt = static_cast<int>(inputs_b.states.size());
  if (static_cast<int>(table.size()) != ns * nt * outcomes) throw Error(ErrorKind::Dimension, "memory table size");
  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < nt; ++t) {
      double sum = 0.0;
      for (int i = 0; i < outcomes; ++i) {
        if (at(s, t, i) < -tol) throw Error(ErrorKind::Value, "negative probability in memory table");
        sum += at(s, t, i);
      }
      if (std::abs(sum - 1.0) > tol) throw Error(ErrorKind::Value, "memory table row does not sum to one");
    }
}

MemoryProtocolRun run_memory_protocol(const ChoiState& choi, const LocalStateSet& inputs_a,
                                      const LocalStateSet& inputs_b, const EveStrategy& strategy) {
  if (inputs_a.dim != choi.d_in || inputs_b.dim != choi.d_out)
    throw Error(ErrorKind::Dimension, "input sets do not match the channel");
  if (strategy_dims(strategy) != DimList{choi.d_out})
    throw Error(ErrorKind::Dimension, "strategy must act on the channel output and its ancilla");
  MemoryProtocolRun run{choi, inputs_a, inputs_b, choi.d_out * choi.d_out, {}};
  const std::size_t nt = inputs_b.states.size();
  for (const auto& tau : inputs_a.states) {
    const DensityMatrix out{{choi.d_out}, channel_output(choi, tau.transpose())};
    const auto t = run_protocol(out, {inputs_b}, strategy);
    for (std::size_t r = 0; r < nt; ++r)
      for (std::size_t i = 0; i < t.cols(); ++i) run.table.push_back(t.at(r, i));
  }
  return run;
}

MemoryProtocolRun run_memory_protocol(const ChoiState& choi, const EveStrategy& strategy) {
  return run_memory_protocol(choi, qudit_toolkit(choi.d_in).states, qudit_toolkit(choi.d_out).states, strategy);
}

std::vector<CMatrix> memory_postselected_states(const ChoiState& choi, const EveStrategy& strategy) {
  const int da = choi.d_in, db = choi.d_out;
  if (strategy_dims(strategy) != DimList{db}) throw Error(ErrorKind::Dimension, "strategy dimension mismatch");
  const int outcomes = db * db;
  std::vector<CMatrix> out(outcomes, CMatrix::Zero(da * db, da * db));
  const CMatrix& j = choi.state.matrix;
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < da; ++b) {
      const DensityMatrix block{{db}, j.block(a * db, b * db, db, db)};
      const auto m = postselected_states(block, strategy);
      for (int i = 0; i < outcomes; ++i)
        out[i].block(a * db, b * db, db, db) = static_cast<double>(da) * m[i];
    }
  for (auto& m : out) m = partial_transpose(m, {da, db}, 0);
  return out;
}

double memory_mdi_value(const LocalDecomposition& dec, const MemoryProtocolRun& run) {
  const int da = run.channel.d_in, db = run.channel.d_out;
  if (dec.dims() != DimList{da, db}) throw Error(ErrorKind::Dimension, "witness does not act on (A, B')");
  if (!same_states(run.inputs_a, qudit_toolkit(da).states) || !same_states(run.inputs_b, qudit_toolkit(db).states))
    throw Error(ErrorKind::Value, "memory value needs the default local states as inputs");
  const int ns = da * da, nt = db * db;
  double total = 0.0;
  for (int i = 0; i < run.outcomes; ++i) {
    const auto beta = dec.setting({0, i});
    for (int s = 0; s < ns; ++s)
      for (int t = 0; t < nt; ++t) total += (*beta)[static_cast<std::size_t>(s * nt + t)] * run.at(s, t, i);
  }
  return total / (static_cast<double>(run.outcomes) * da * da);
}

double memory_c_value(const LocalDecomposition& dec, const MemoryProtocolRun& run) {
  return dec.omega() * memory_mdi_value(dec, run);
}

SdpSolution quantify_memory(const MemoryProtocolRun& run, const SdpOptions& options) {
  return mdi_quantify_memory(run.table, run.inputs_a, run.inputs_b, options);
}

}  // namespace mdi
