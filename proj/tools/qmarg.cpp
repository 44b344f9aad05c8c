// Copyright 2026 The qmarg Authors
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


// qmarg: decide whether a pure state is determined by its (n-1)-qubit
// marginals, build GHZ families, and construct pure partners.

#include <complex>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmarg/commands.hpp"

namespace {

using qmarg::cplx;
namespace cli = qmarg::cli;

void add_family_flags(CLI::App* sub, cli::FamilySpec& f) {
  sub->add_option("-n,--qubits", f.n, "Number of qubits")->capture_default_str();
  sub->add_option("-a,--alpha", f.a, "Amplitude of |0...0> (complex, e.g. 0.6 or 0.6+0.1i)");
  sub->add_option("-b,--beta", f.b, "Amplitude of |1...1> (complex)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-density-matrix determinedness of multi-qubit pure states"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::CommonOptions common;
  app.add_option("--tol", common.tol, "Verdict tolerance")->capture_default_str();
  app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  app.add_option("--restarts", common.restarts, "Random restarts of the feasible-step search")->capture_default_str();
  app.add_option("--out", common.out,
                 "rdm/verdict/sweep/proofcheck: also write the report here; partner: output state file; "
                 "family: output file prefix");

  std::string input, psi_path, omega_path;
  auto* rdm = app.add_subcommand("rdm", "Print all (n-1)-qubit reduced density matrices");
  rdm->add_option("input", input, "State file")->required();

  auto* verdict = app.add_subcommand("verdict", "Decide determinedness (exit 0 determined, 3 undetermined)");
  verdict->add_option("input", input, "Pure state file")->required();

  auto* partner = app.add_subcommand("partner", "Construct a distinct pure state with the same marginals");
  partner->add_option("psi", psi_path, "Pure state file")->required();
  partner->add_option("omega", omega_path, "Mixed state file with the same marginals")->required();

  cli::SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Run Haar and rotated-GHZ samples through every check");
  sweep->add_option("-n,--qubits", sweep_opt.n, "Number of qubits (2..6)")->capture_default_str();
  sweep->add_option("--samples", sweep_opt.samples, "Number of samples")->capture_default_str();
  sweep->add_option("--threads", sweep_opt.threads, "Worker threads (0: all cores)")->capture_default_str();

  cli::FamilySpec family_spec;
  cplx z{0.0};
  auto* proofcheck = app.add_subcommand("proofcheck", "Check purification and environment-vector relations");
  add_family_flags(proofcheck, family_spec);
  proofcheck->add_option("-z", z, "Family parameter, |z| <= 1");

  std::vector<cplx> zs;
  auto* family = app.add_subcommand("family", "Emit members of the GHZ family");
  add_family_flags(family, family_spec);
  family->add_option("-z", zs, "Family parameters (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::exit_code::kInput;
  }

  cli::Report report;
  if (*rdm) report = cli::cmd_rdm(input, common);
  else if (*verdict) report = cli::cmd_verdict(input, common);
  else if (*partner) report = cli::cmd_partner(psi_path, omega_path, common);
  else if (*sweep) report = cli::cmd_sweep(sweep_opt, common);
  else if (*proofcheck) report = cli::cmd_proofcheck(family_spec, z, common);
  else report = cli::cmd_family(family_spec, zs, common);

  const std::string text = report.body.dump(2) + "\n";
  std::cout << text;
  const bool report_to_file = !common.out.empty() && (*rdm || *verdict || *sweep || *proofcheck);
  if (report_to_file) {
    try {
      cli::write_text(common.out, text);
    } catch (const std::exception& e) {
      std::cerr << "qmarg: " << e.what() << "\n";
      return cli::exit_code::kInput;
    }
  }
  if (report.body.contains("error")) std::cerr << "qmarg: " << report.body["error"]["message"].get<std::string>() << "\n";
  return report.exit_code;
}
