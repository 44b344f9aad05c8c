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


#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qmarg/compat.hpp"
#include "qmarg/construct.hpp"
#include "qmarg/error.hpp"
#include "qmarg/ghz.hpp"
#include "qmarg/io.hpp"
#include "qmarg/lemmas.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/rdm.hpp"
#include "qmarg/schmidt.hpp"

namespace qmarg::cli {

using Json = nlohmann::ordered_json;

/// Process exit codes. Each value has exactly one meaning.
namespace exit_code {
inline constexpr int kOk = 0;  // also "determined"
inline constexpr int kInternal = 1;
inline constexpr int kInput = 2;
inline constexpr int kUndetermined = 3;
inline constexpr int kInconclusive = 4;  // also numerical failure
inline constexpr int kAnomaly = 5;       // theorem-violation flag
}  // namespace exit_code

struct CommonOptions {
  double tol = tol::kVerdict;
  std::uint64_t seed = 0;
  int restarts = 64;
  std::string out;
};

struct Report {
  Json body;
  int exit_code = exit_code::kOk;
};

/// Proof-machinery residual bound used by proofcheck and sweep.
inline constexpr double kProofResidual = 1e-9;

inline Json complex_json(cplx c) { return Json::array({c.real(), c.imag()}); }

inline Json vector_json(std::span<const cplx> v) {
  auto out = Json::array();
  for (const auto& c : v) out.push_back(complex_json(c));
  return out;
}

inline Json matrix_json(const Matrix& m) {
  auto rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json input_json(const std::string& path, const io::StateFile& f) {
  return {{"path", path}, {"kind", f.kind()}, {"n", f.n()}, {"digest", "fnv1a64:" + io::hex_digest(f.digest)}};
}

inline Json params_json(const GhzParams& p) {
  return {{"n", p.n}, {"a", complex_json(p.a)}, {"b", complex_json(p.b)}};
}

inline Json certificate_json(const GhzCertificate& c) {
  Json j{{"status", to_string(c.status)}, {"branch", c.branch}, {"q", c.q}, {"residual", c.residual}};
  if (c.params) {
    j["params"] = params_json(*c.params);
    j["global_phase"] = complex_json(c.global_phase);
    auto bases = Json::array();
    for (const auto& uv : c.local_bases) bases.push_back({{"u", vector_json(uv[0])}, {"v", vector_json(uv[1])}});
    j["local_bases"] = std::move(bases);
  }
  j["search_min"] = c.search_min;
  j["partner_defect"] = c.partner_defect;
  j["factor_overlap"] = c.factor_overlap;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

/// Runs `body`, converting library exceptions into their exit codes. The
/// command echo and seed are written first so failing runs stay replayable.
inline Report run_command(Json command, const CommonOptions& opt, const std::function<void(Report&)>& body) {
  Report r;
  r.body["command"] = std::move(command);
  r.body["seed"] = opt.seed;
  const auto start = std::chrono::steady_clock::now();
  auto fail = [&](int code, const char* kind, const std::string& msg) {
    r.exit_code = code;
    r.body["error"] = {{"kind", kind}, {"message", msg}};
  };
  try {
    body(r);
  } catch (const InvalidInput& e) {
    fail(exit_code::kInput, "invalid_input", e.what());
  } catch (const NumericalFailure& e) {
    fail(exit_code::kInconclusive, "numerical_failure", e.what());
  } catch (const TheoremViolation& e) {
    fail(exit_code::kAnomaly, "theorem_violation", e.what());
  } catch (const std::exception& e) {
    fail(exit_code::kInternal, "internal", e.what());
  }
  r.body["exit_code"] = r.exit_code;
  // Wall time lives under its own key; everything else is a function of (inputs, seed).
  r.body["timing"] = {
      {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  return r;
}

inline PureState require_pure(const io::StateFile& f, const std::string& what) {
  if (!f.pure()) throw InvalidInput(what + " must be a pure state (kind \"pure\"), got a density matrix");
  return std::get<PureState>(f.value);
}

inline DensityMatrix as_density(const io::StateFile& f) {
  return f.pure() ? DensityMatrix::projector(std::get<PureState>(f.value)) : std::get<DensityMatrix>(f.value);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InvalidInput("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------

inline Report cmd_rdm(const std::string& path, const CommonOptions& opt = {}) {
  return run_command({{"name", "rdm"}, {"input", path}}, opt, [&](Report& r) {
    const auto file = io::read_state(path);
    r.body["inputs"] = Json::array({input_json(path, file)});
    if (file.n() < 2) throw InvalidInput("rdm: n >= 2 required (got n = " + std::to_string(file.n()) + ")");
    const auto tuple = ptr_tuple(as_density(file));
    auto parts = Json::array();
    for (int j = 1; j <= tuple.n(); ++j)
      parts.push_back({{"traced_qubit", j}, {"matrix", matrix_json(tuple.part(j).matrix())}});
    r.body["rdms"] = std::move(parts);
    r.body["consistency_residual"] = tuple.consistency_residual();
  });
}

inline Report cmd_verdict(const std::string& path, const CommonOptions& opt = {}) {
  Json echo{{"name", "verdict"}, {"input", path}, {"restarts", opt.restarts}, {"tol", opt.tol}};
  return run_command(std::move(echo), opt, [&](Report& r) {
    const auto file = io::read_state(path);
    r.body["inputs"] = Json::array({input_json(path, file)});
    const auto psi = require_pure(file, "verdict input");
    if (opt.restarts < 0) throw InvalidInput("verdict: restarts must be >= 0");
    const auto v = determinedness(psi, {opt.restarts, opt.seed, opt.tol});

    r.body["verdict"] = to_string(v.verdict);
    r.body["determined"] = v.determined();
    r.body["numericSupTmax"] = v.numeric_sup_tmax();
    r.body["search"] = {{"samples", v.samples_used()},
                        {"best_source", v.search.best_source},
                        {"support_dim", v.search.support_dim},
                        {"support_directions", v.search.support_directions}};
    r.body["ghz"] = certificate_json(v.ghz);
    if (v.witness) {
      Json z = Json::array();
      for (auto c : v.witness->checked_z) z.push_back(complex_json(c));
      r.body["witness"] = {{"params", params_json(v.witness->params)},
                           {"family", "|a|^2 |U><U| + |b|^2 |V><V| + (z a b* |U><V| + h.c.), |z| <= 1"},
                           {"checked_z", std::move(z)},
                           {"max_rdm_distance", v.witness->max_rdm_distance}};
    }
    r.body["anomaly"] = v.anomaly;
    if (v.anomaly) r.body["anomaly_note"] = v.anomaly_note;

    if (v.anomaly) r.exit_code = exit_code::kAnomaly;
    else if (v.verdict == Verdict::Determined) r.exit_code = exit_code::kOk;
    else if (v.verdict == Verdict::Undetermined) r.exit_code = exit_code::kUndetermined;
    else r.exit_code = exit_code::kInconclusive;
  });
}

inline Report cmd_partner(const std::string& psi_path, const std::string& omega_path, const CommonOptions& opt = {}) {
  Json echo{{"name", "partner"}, {"psi", psi_path}, {"omega", omega_path}, {"out", opt.out}};
  return run_command(std::move(echo), opt, [&](Report& r) {
    const auto fpsi = io::read_state(psi_path);
    const auto fomega = io::read_state(omega_path);
    r.body["inputs"] = Json::array({input_json(psi_path, fpsi), input_json(omega_path, fomega)});
    const auto psi = require_pure(fpsi, "psi");
    const auto res = pure_partner(psi, as_density(fomega));

    r.body["a_star"] = res.a_star;
    r.body["legitimate_interval"] = Json::array({res.a_minus, res.a_star});
    r.body["solver"] = res.solver;
    r.body["overlap"] = res.overlap;
    r.body["rdm_residual"] = res.rdm_distance;
    r.body["mixture"] = {{"lambda", res.mixture_lambda}, {"residual", res.mixture_residual}};
    r.body["low_eigenvalue"] = {{"at_one", res.low_at_one}, {"at_a_star", res.low_at_star}};
    r.body["omega_p"] = res.restriction.p;
    if (opt.out.empty()) {
      r.body["partner"] = io::state_json(res.state);
    } else {
      io::write_state(opt.out, res.state);
      r.body["partner_file"] = opt.out;
    }
  });
}

struct SweepOptions {
  int n = 3;
  int samples = 50;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

struct SweepSample {
  std::string cls;
  std::uint64_t seed = 0;
  std::string verdict;
  bool expected = false;
  double sup = 0.0;
  bool anomaly = false;
  std::string note;
  // GHZ samples only.
  cplx z;
  int rank = -1;
  double env_residual = NAN;
  double main_constraint = NAN;
  std::string error;
};

inline Matrix local_operator(const std::vector<Matrix>& us) {
  Matrix u = us.front();
  for (std::size_t k = 1; k < us.size(); ++k) u = kron(u, us[k]);
  return u;
}

inline void add_note(SweepSample& s, const std::string& msg) { s.note += (s.note.empty() ? "" : "; ") + msg; }

inline SweepSample run_sweep_sample(int n, std::size_t index, const CommonOptions& opt) {
  SweepSample s;
  s.seed = derive_seed(opt.seed, index);
  s.cls = index % 2 == 0 ? "haar" : "ghz";
  try {
    SplitMix64 rng(derive_seed(s.seed, 1));
    std::optional<PureState> psi;
    std::optional<DensityMatrix> omega;
    if (s.cls == "haar") {
      psi = haar_random_state(n, derive_seed(s.seed, 2));
    } else {
      const double theta = 0.1 + (std::numbers::pi / 2 - 0.2) * rng.uniform();
      const GhzParams params(n, std::cos(theta), std::polar(std::sin(theta), 2 * std::numbers::pi * rng.uniform()));
      s.z = std::polar(0.95 * rng.uniform(), 2 * std::numbers::pi * rng.uniform());
      const auto us = random_local_unitaries(n, rng);
      const Matrix u = local_operator(us);
      psi = PureState(n, apply_local(make_ghz(params).amps(), us));
      omega = DensityMatrix(u * ghz_family(params, s.z).matrix() * u.adjoint());
    }

    const auto v = determinedness(*psi, {opt.restarts, derive_seed(s.seed, 3), opt.tol});
    s.verdict = to_string(v.verdict);
    s.sup = v.numeric_sup_tmax();
    if (v.anomaly) {
      s.anomaly = true;
      add_note(s, v.anomaly_note);
    }
    // Every two-qubit state with two nonzero Schmidt coefficients is GHZ-type.
    const bool expect_undetermined = s.cls == "ghz" || n == 2;
    s.expected = v.verdict == (expect_undetermined ? Verdict::Undetermined : Verdict::Determined);

    if (omega) {
      s.rank = static_cast<int>(numeric_rank(omega->matrix()));
      if (n >= 3 && !rank2_check(*psi, *omega)) {
        s.anomaly = true;
        add_note(s, "family member has rank " + std::to_string(s.rank));
      }
      const auto p = purify(*omega);
      std::vector<EnvVectors> envs;
      s.env_residual = 0.0;
      for (int j = 1; j <= n; ++j) {
        envs.push_back(extract_env_vectors(p, *psi, j));
        s.env_residual = std::max(s.env_residual, env_residuals(envs.back()).max());
      }
      s.main_constraint = max_main_constraint_residual(envs, *psi);
      if (!(s.env_residual <= kProofResidual && s.main_constraint <= kProofResidual)) {
        s.anomaly = true;
        add_note(s, "proof residuals above " + std::to_string(kProofResidual));
      }
    }
  } catch (const TheoremViolation& e) {
    s.anomaly = true;
    s.error = e.what();
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

}  // namespace detail

/// Haar and locally rotated GHZ samples, alternating. Samples are independent
/// (per-sample derived seeds) and run on a thread pool; results are assembled
/// in index order.
inline Report cmd_sweep(const SweepOptions& sw, const CommonOptions& opt = {}) {
  Json echo{{"name", "sweep"}, {"n", sw.n}, {"samples", sw.samples}, {"restarts", opt.restarts}, {"tol", opt.tol}};
  return run_command(std::move(echo), opt, [&](Report& r) {
    if (sw.n < 2 || sw.n > 6) throw InvalidInput("sweep: n must be in 2..6 (got " + std::to_string(sw.n) + ")");
    if (sw.samples < 1) throw InvalidInput("sweep: samples must be >= 1");
    if (opt.restarts < 0) throw InvalidInput("sweep: restarts must be >= 0");

    const auto count = static_cast<std::size_t>(sw.samples);
    std::vector<detail::SweepSample> out(count);
    unsigned threads = sw.threads ? sw.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < count;) out[i] = detail::run_sweep_sample(sw.n, i, opt);
        });
    }

    Json per = Json::array();
    std::size_t anomalies = 0, errors = 0, unexpected = 0;
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& s = out[i];
      Json j{{"index", i}, {"class", s.cls}, {"seed", s.seed}};
      if (s.error.empty()) {
        j["verdict"] = s.verdict;
        j["numericSupTmax"] = s.sup;
        j["expected"] = s.expected;
        ++counts[s.cls][s.verdict];
        unexpected += !s.expected;
      } else {
        j["error"] = s.error;
        ++counts[s.cls]["error"];
        ++errors;
      }
      if (s.cls == "ghz") {
        j["z"] = complex_json(s.z);
        j["rank"] = s.rank;
        j["env_residual"] = s.env_residual;
        j["main_constraint_residual"] = s.main_constraint;
      }
      j["anomaly"] = s.anomaly;
      if (!s.note.empty()) j["note"] = s.note;
      anomalies += s.anomaly;
      per.push_back(std::move(j));
    }
    Json summary;
    for (const auto& [cls, m] : counts) summary[cls] = Json(m);
    r.body["summary"] = {{"counts", summary},
                         {"unexpected_verdicts", unexpected},
                         {"errors", errors},
                         {"theorem_violation_flags", anomalies}};
    r.body["samples"] = std::move(per);
    r.exit_code = anomalies ? exit_code::kAnomaly : exit_code::kOk;
  });
}

struct FamilySpec {
  int n = 3;
  cplx a{std::numbers::sqrt2 / 2};
  cplx b{std::numbers::sqrt2 / 2};
};

inline Report cmd_proofcheck(const FamilySpec& f, cplx z, const CommonOptions& opt = {}) {
  Json echo{{"name", "proofcheck"}, {"n", f.n}, {"a", complex_json(f.a)}, {"b", complex_json(f.b)},
            {"z", complex_json(z)}};
  return run_command(std::move(echo), opt, [&](Report& r) {
    const GhzParams params(f.n, f.a, f.b);
    const auto psi = make_ghz(params);
    const auto omega = ghz_family(params, z);
    const auto p = purify(omega);
    const auto ctx = make_proof_context(p, psi);

    EnvResiduals worst;
    double cross = 0.0;
    for (const auto& env : ctx.envs) {
      const auto res = env_residuals(env);
      worst.big_e_orthonormality = std::max(worst.big_e_orthonormality, res.big_e_orthonormality);
      worst.omega_orthonormality = std::max(worst.omega_orthonormality, res.omega_orthonormality);
      worst.first_env_relation = std::max(worst.first_env_relation, res.first_env_relation);
      worst.second_env_relation = std::max(worst.second_env_relation, res.second_env_relation);
      worst.consistency = std::max(worst.consistency, res.consistency);
      if (!env.product()) cross = std::max({cross, norm(env.small[0][1]), norm(env.small[1][0])});
    }
    const double main = max_main_constraint_residual(ctx.envs, psi);

    r.body["env_dim"] = p.env_dim;
    r.body["residuals"] = {{"E_orthonormality", worst.big_e_orthonormality},
                           {"Omega_orthonormality", worst.omega_orthonormality},
                           {"first_env_relation", worst.first_env_relation},
                           {"second_env_relation", worst.second_env_relation},
                           {"Omega_consistency", worst.consistency},
                           {"main_constraint", main}};
    r.body["cross_env_max"] = cross;
    Json lemmas;
    const auto tally = [](const LemmaTally& t) {
      return Json{{"applicable", t.applicable}, {"held", t.held}, {"worst", t.worst}};
    };
    lemmas["lemma1"] = tally(check_lemma1(ctx));
    lemmas["lemma2"] = tally(check_lemma2(ctx));
    lemmas["lemma3"] = tally(check_lemma3(ctx));
    lemmas["lemma4"] = tally(check_lemma4(ctx));
    r.body["lemmas"] = std::move(lemmas);

    const bool ok = std::max(worst.max(), main) <= kProofResidual && check_lemma1(ctx).ok() &&
                    check_lemma2(ctx).ok() && check_lemma3(ctx).ok() && check_lemma4(ctx).ok();
    r.body["ok"] = ok;
    r.exit_code = ok ? exit_code::kOk : exit_code::kAnomaly;
  });
}

/// Writes family members (and psi) as state files `<out>_psi.json`,
/// `<out>_<k>.json`; without --out the matrices go into the report.
inline Report cmd_family(const FamilySpec& f, const std::vector<cplx>& zs, const CommonOptions& opt = {}) {
  Json zj = Json::array();
  for (auto z : zs) zj.push_back(complex_json(z));
  Json echo{{"name", "family"}, {"n", f.n}, {"a", complex_json(f.a)}, {"b", complex_json(f.b)}, {"z", zj},
            {"out", opt.out}};
  return run_command(std::move(echo), opt, [&](Report& r) {
    if (zs.empty()) throw InvalidInput("family: at least one z is required");
    const GhzParams params(f.n, f.a, f.b);
    const auto psi = make_ghz(params);
    const auto ref = ptr_tuple(psi);
    if (!opt.out.empty()) {
      io::write_state(opt.out + "_psi.json", psi);
      r.body["psi_file"] = opt.out + "_psi.json";
    }
    Json members = Json::array();
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const auto omega = ghz_family(params, zs[k]);
      Json m{{"z", complex_json(zs[k])},
             {"rdm_distance", rdm_max_distance(ptr_tuple(omega), ref)},
             {"rank", numeric_rank(omega.matrix())}};
      if (opt.out.empty()) {
        m["state"] = io::state_json(omega);
      } else {
        const std::string path = opt.out + "_" + std::to_string(k) + ".json";
        io::write_state(path, omega);
        m["file"] = path;
      }
      members.push_back(std::move(m));
    }
    r.body["members"] = std::move(members);
  });
}

}  // namespace qmarg::cli
