// Copyright 2026 snapsynth developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "snapsynth/state_prep.hpp"
#include "snapsynth/unitary_synth.hpp"

namespace {

using namespace snapsynth;

constexpr int kExitOk = 0;
constexpr int kExitQuality = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  int cutoff = 0;  // 0 = per-scheme default rule
  int max_evals = 2000000;
  std::uint64_t seed = 12345;
  double fidelity = 0.999;  // target / pass threshold
  std::string scheme = "auto";
  std::string out;  // empty = stdout
  bool verbose = false;

  OptimizerConfig optimizer() const {
    OptimizerConfig cfg;
    cfg.max_evals = max_evals;
    cfg.seed = seed;
    return cfg;
  }
};

void add_common_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--cutoff", rc.cutoff, "Fock-space cutoff override")
      ->envname("SNAPSYNTH_CUTOFF");
  cmd->add_option("--max-evals", rc.max_evals, "Objective evaluation budget")
      ->envname("SNAPSYNTH_MAX_EVALS");
  cmd->add_option("--seed", rc.seed, "Seed for randomized restarts")
      ->envname("SNAPSYNTH_SEED");
  cmd->add_option("--out", rc.out, "Output path (default: stdout)");
  cmd->add_flag("--verbose", rc.verbose, "Progress notes on stderr");
}

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output file " << path << "\n";
    return kExitUsage;
  }
  f << text;
  return kExitOk;
}

std::optional<nlohmann::json> load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot read " << path << "\n";
    return std::nullopt;
  }
  try {
    return nlohmann::json::parse(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

Eigen::VectorXcd coeffs_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument("coefficient list must be a non-empty array");
  }
  Eigen::VectorXcd c(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    if (e.is_number()) {
      c(i) = Complex(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2) {
      c(i) = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      throw std::invalid_argument("coefficients must be numbers or [re, im] pairs");
    }
  }
  const double norm = c.norm();
  if (norm <= 0.0) throw std::invalid_argument("coefficient list has zero norm");
  return c / norm;
}

// "fock:n" | "uniform:N" | inline JSON array | path to a JSON array
TargetState parse_target_spec(const std::string& spec) {
  if (spec.rfind("fock:", 0) == 0) {
    return TargetState::fock(std::stoi(spec.substr(5)));
  }
  if (spec.rfind("uniform:", 0) == 0) {
    return TargetState::uniform(std::stoi(spec.substr(8)));
  }
  if (!spec.empty() && spec.front() == '[') {
    return TargetState(coeffs_from_json(nlohmann::json::parse(spec)));
  }
  std::ifstream f(spec);
  if (!f) {
    throw std::invalid_argument("cannot read target file " + spec);
  }
  return TargetState(coeffs_from_json(nlohmann::json::parse(f)));
}

int emit_plan(const PrepPlan& plan, const std::string& scheme, const RunConfig& rc) {
  nlohmann::json j = plan_to_json(plan, scheme);
  j["threshold"] = rc.fidelity;
  const int wr = write_output(j.dump(2) + "\n", rc.out);
  if (wr != kExitOk) return wr;
  return plan.fidelity >= rc.fidelity ? kExitOk : kExitQuality;
}

int cmd_prepare_state(const std::string& target_spec, const RunConfig& rc) {
  TargetState target = [&] { return parse_target_spec(target_spec); }();
  const CutoffDim cutoff = rc.cutoff > 0 ? CutoffDim(rc.cutoff)
                                         : default_prep_cutoff(target.max_level());
  try {
    return emit_plan(compile_state_prep(target, cutoff, rc.optimizer()), "linear", rc);
  } catch (const So2StepError& e) {
    std::cerr << "compile failed: " << e.what() << "\n";
    return kExitQuality;
  }
}

int cmd_prepare_fock(int n, const RunConfig& rc) {
  if (n < 0) {
    std::cerr << "error: fock level must be non-negative\n";
    return kExitUsage;
  }
  const OptimizerConfig opt = rc.optimizer();

  auto compile_linear = [&] {
    const CutoffDim cutoff =
        rc.cutoff > 0 ? CutoffDim(rc.cutoff) : default_prep_cutoff(n);
    return compile_state_prep(TargetState::fock(n), cutoff, opt);
  };
  auto compile_sub = [&] {
    const CutoffDim cutoff =
        rc.cutoff > 0 ? CutoffDim(rc.cutoff) : sublinear_cutoff(n);
    return compile_fock_sublinear(n, rc.fidelity, cutoff, opt);
  };

  try {
    if (rc.scheme == "linear" || n == 0) {
      return emit_plan(compile_linear(), "linear", rc);
    }
    if (rc.scheme == "sublinear") {
      return emit_plan(compile_sub(), "sublinear", rc);
    }
    if (rc.scheme != "auto") {
      std::cerr << "error: unknown scheme '" << rc.scheme << "'\n";
      return kExitUsage;
    }
    // auto: fewer SNAP gates wins, ties go to the linear scheme
    const PrepPlan linear = compile_linear();
    try {
      const PrepPlan sub = compile_sub();
      if (sub.snap_count < linear.snap_count) {
        return emit_plan(sub, "sublinear", rc);
      }
    } catch (const FoldingBudgetError& e) {
      if (rc.verbose) std::cerr << "sublinear attempt: " << e.what() << "\n";
    }
    return emit_plan(linear, "linear", rc);
  } catch (const FoldingBudgetError& e) {
    std::cerr << "compile failed: " << e.what() << "\n";
    emit_plan(e.best_plan(), rc.scheme, rc);  // best-effort plan
    return kExitQuality;
  } catch (const So2StepError& e) {
    std::cerr << "compile failed: " << e.what() << "\n";
    return kExitQuality;
  }
}

int cmd_synthesize_unitary(const std::string& matrix_file, const RunConfig& rc) {
  const auto j = load_json(matrix_file);
  if (!j) return kExitUsage;
  TargetUnitary target = target_from_json(*j, rc.cutoff);
  try {
    const SynthReport report = compile_unitary(target, rc.optimizer());
    nlohmann::json out = report_to_json(report);
    out["threshold"] = rc.fidelity;
    const int wr = write_output(out.dump(2) + "\n", rc.out);
    if (wr != kExitOk) return wr;
    return report.f_unitary_full >= rc.fidelity ? kExitOk : kExitQuality;
  } catch (const SynthError& e) {
    std::cerr << "synthesis failed: " << e.what() << "\n";
    write_output(report_to_json(e.partial_report()).dump(2) + "\n", rc.out);
    return kExitQuality;
  }
}

int cmd_verify(const std::string& sequence_file, const std::string& expect_file) {
  auto jseq = load_json(sequence_file);
  const auto jexp = load_json(expect_file);
  if (!jseq || !jexp) return kExitUsage;

  // accept both the canonical sequence format and emitted plan/report JSON
  if (jseq->is_object() && jseq->contains("sequence")) {
    *jseq = jseq->at("sequence");
  }
  const GateSequence seq = sequence_from_json(*jseq);
  const std::string type = jexp->at("type").get<std::string>();
  const double threshold = jexp->value("threshold", 0.999);
  double fidelity = 0.0;
  if (type == "state") {
    TargetState target = jexp->contains("preset")
                             ? parse_target_spec(jexp->at("preset").get<std::string>())
                             : TargetState(coeffs_from_json(jexp->at("coeffs")));
    const TruncatedState out =
        apply_sequence(seq, TruncatedState::vacuum(seq.cutoff)).state;
    fidelity = state_fidelity(out, target.embed(seq.cutoff));
  } else if (type == "unitary") {
    const Eigen::MatrixXcd block = matrix_from_json(*jexp);
    const int d = static_cast<int>(block.rows());
    if (d > seq.cutoff.nc) {
      std::cerr << "error: expectation dimension exceeds the sequence cutoff\n";
      return kExitUsage;
    }
    const double dev =
        (block.adjoint() * block - Eigen::MatrixXcd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();
    if (dev > 1e-8) {
      std::cerr << "error: expectation matrix is not unitary\n";
      return kExitUsage;
    }
    Operator want = Operator::Identity(seq.cutoff.nc, seq.cutoff.nc);
    want.topLeftCorner(d, d) = block;
    const Operator u = sequence_unitary(seq);
    const std::string mode = jexp->value("mode", "full");
    fidelity = (mode == "block") ? unitary_fidelity_block(u, want, d)
                                 : unitary_fidelity(u, want);
  } else {
    std::cerr << "error: expectation type must be 'state' or 'unitary'\n";
    return kExitUsage;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", fidelity);
  std::cout << buf << "\n";
  return fidelity >= threshold ? kExitOk : kExitQuality;
}

int cmd_sweep(const std::string& spec_file, const RunConfig& rc) {
  const auto j = load_json(spec_file);
  if (!j) return kExitUsage;
  const auto n_values = j->at("n_values").get<std::vector<int>>();
  const auto fidelities = j->at("fidelities").get<std::vector<double>>();

  const SweepTable table = gate_count_sweep(n_values, fidelities, rc.optimizer());
  const int wr = write_output(sweep_to_csv(table), rc.out);
  if (wr != kExitOk) return wr;

  // missing cells go to a companion log (stderr when writing to stdout)
  if (!rc.out.empty()) {
    std::ofstream log(rc.out + ".log", std::ios::binary);
    log << "missing_cells " << table.failures.size() << "\n";
    for (const std::string& f : table.failures) log << f << "\n";
  } else {
    for (const std::string& f : table.failures) std::cerr << "missing: " << f << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displacement+SNAP gate synthesis for a truncated oscillator"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string target_spec, matrix_file, sequence_file, expect_file, spec_file;
  int fock_n = 0;

  CLI::App* prep = app.add_subcommand(
      "prepare-state", "Compile a target state into displacement+SNAP gates");
  prep->add_option("target", target_spec,
                   "fock:n | uniform:N | JSON coefficient array | file")
      ->required();
  prep->add_option("--fidelity", rc.fidelity, "Pass/fail threshold");
  add_common_flags(prep, rc);

  CLI::App* fock = app.add_subcommand(
      "prepare-fock", "Compile |n> with the linear or sublinear scheme");
  fock->add_option("n", fock_n, "Target number state")->required();
  fock->add_option("--fidelity", rc.fidelity, "Target fidelity / threshold");
  fock->add_option("--scheme", rc.scheme, "linear | sublinear | auto");
  add_common_flags(fock, rc);

  CLI::App* synth = app.add_subcommand(
      "synthesize-unitary", "Compile a target unitary from a matrix JSON file");
  synth->add_option("matrix", matrix_file, "JSON file {dim, matrix}")->required();
  synth->add_option("--fidelity", rc.fidelity, "Pass/fail threshold on F_full");
  add_common_flags(synth, rc);

  CLI::App* verify = app.add_subcommand(
      "verify", "Re-simulate a gate sequence against an expectation");
  verify->add_option("sequence", sequence_file, "Gate sequence JSON file")
      ->required();
  verify->add_option("--expect", expect_file, "Expectation JSON file")->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Gate-count sweep over n and target fidelities (CSV)");
  sweep->add_option("spec", spec_file, "JSON file {n_values, fidelities}")
      ->required();
  add_common_flags(sweep, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (prep->parsed()) return cmd_prepare_state(target_spec, rc);
    if (fock->parsed()) return cmd_prepare_fock(fock_n, rc);
    if (synth->parsed()) return cmd_synthesize_unitary(matrix_file, rc);
    if (verify->parsed()) return cmd_verify(sequence_file, expect_file);
    if (sweep->parsed()) return cmd_sweep(spec_file, rc);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQuality;
  }
  return kExitUsage;
}
