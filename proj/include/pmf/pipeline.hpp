#pragma once

// Orchestration shared by the command-line tool and the acceptance suite:
// classical sources -> Katz basis -> U_p -> e -> eigensystems -> companion
// pairs -> combination -> classicality certificate.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmf/companion.hpp"
#include "pmf/error.hpp"
#include "pmf/family.hpp"
#include "pmf/io.hpp"
#include "pmf/overconv.hpp"

namespace pmf::pipeline {

enum ExitCode : int { Ok = 0, ChecksFailed = 1, BadInput = 2, PrecisionExhausted = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TruncationTooShort:
    case ErrorKind::NotStable:
    case ErrorKind::NoStabilization:
    case ErrorKind::RankDeficiency:
      return PrecisionExhausted;
    default:
      return BadInput;
  }
}

struct Config {
  PrimeContext ctx;
  std::int64_t level;
  DirichletCharacter character;
  int weight;
  int depth = -1;  // -1 selects katz_min_depth
  std::string fixtures;
  std::optional<std::string> cache;
  int threads = 1;
  std::vector<std::int64_t> hecke_primes;  // empty selects the defaults

  int katz_depth() const { return depth >= 0 ? depth : katz_min_depth(ctx); }
};

/// Cache directory: MF_CACHE_DIR wins over the configured one.
inline std::optional<std::string> cache_dir(const std::optional<std::string>& configured) {
  if (const char* env = std::getenv("MF_CACHE_DIR"); env && *env) return std::string(env);
  return configured;
}

inline std::string source_path(const std::string& fixtures, int weight) {
  return fixtures + "/S" + std::to_string(weight) + ".mfb";
}

inline std::vector<BasisMatrix> load_sources(const Config& cfg) {
  std::vector<BasisMatrix> out;
  const int step = static_cast<int>(cfg.ctx.p() - 1);
  for (int j = 0; j <= cfg.katz_depth(); ++j)
    out.push_back(io::ingest_basis(source_path(cfg.fixtures, cfg.weight + j * step), cfg.ctx));
  return out;
}

/// Up to four primes q not dividing p times the level for which T_q keeps
/// the truncation of the Katz span above its adequacy bound.
inline std::vector<std::int64_t> default_hecke_primes(const PrimeContext& ctx, std::int64_t level, const BasisMatrix& span) {
  std::vector<std::int64_t> out;
  const int bound = adequate_truncation(span);
  for (std::int64_t q = 2; out.size() < 4 && span.trunc() / q >= bound; ++q)
    if (is_prime(q) && q != ctx.p() && level % q != 0) out.push_back(q);
  return out;
}

inline std::vector<HeckeOperator> hecke_operators(const Config& cfg, const KatzBasis& kb) {
  std::vector<HeckeOperator> ops;
  const auto primes = cfg.hecke_primes.empty() ? default_hecke_primes(cfg.ctx, cfg.level, kb.flat) : cfg.hecke_primes;
  for (auto q : primes) ops.push_back(HeckeOperator::T(q));
  return ops;
}

inline io::MatrixKey matrix_key(const Config& cfg) {
  return {cfg.ctx.p(),  cfg.ctx.nprec(),           cfg.ctx.qprec(),  cfg.level,
          cfg.weight,   cfg.character.spec(),      cfg.katz_depth()};
}

namespace detail {

inline std::optional<io::MatrixRecord> cache_read(const std::optional<std::string>& dir, const io::MatrixKey& key,
                                                  const std::string& what) {
  if (!dir) return std::nullopt;
  const std::string path = *dir + "/" + key.stem() + "." + what + ".mfx";
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto in = io::detail::open_in(path);
  io::MatrixRecord r = io::read_mfx(in);
  if (!(r.key == key)) return std::nullopt;
  return r;
}

inline void cache_write(const std::optional<std::string>& dir, const io::MatrixRecord& r, const std::string& what) {
  if (!dir) return;
  std::filesystem::create_directories(*dir);
  auto out = io::detail::open_out(*dir + "/" + r.key.stem() + "." + what + ".mfx");
  io::write_mfx(out, r);
}

}  // namespace detail

struct OrdinaryRun {
  KatzBasis kb;
  Matrix up;
  OrdinaryProjector proj;
  std::vector<HeckeOperator> hecke;
  EigenExtraction extraction;
  bool up_from_cache = false;
  bool projector_from_cache = false;
};

inline OrdinaryRun run_ordinary(const Config& cfg, const std::vector<BasisMatrix>& sources) {
  const auto dir = cache_dir(cfg.cache);
  const io::MatrixKey key = matrix_key(cfg);
  OrdinaryRun run{build_katz_basis(cfg.weight, cfg.level, cfg.character, sources, cfg.katz_depth(), cfg.ctx,
                                   cfg.threads),
                  {}, {}, {}, {}};
  if (auto r = detail::cache_read(dir, key, "up"); r && r->matrix.rows() == run.kb.flat.rank()) {
    run.up = std::move(r->matrix);
    run.up_from_cache = true;
  } else {
    run.up = up_matrix(run.kb, cfg.threads);
    detail::cache_write(dir, {key, run.up, std::nullopt}, "up");
  }
  if (auto r = detail::cache_read(dir, key, "e"); r && r->matrix.rows() == run.up.rows() && r->stabilization) {
    OrdinaryProjector p;
    p.e_matrix = std::move(r->matrix);
    p.stabilization_exponent = *r->stabilization;
    p.rank = rank_mod_p(p.e_matrix, cfg.ctx);
    run.proj = attach_image(std::move(p), run.kb, cfg.threads);
    run.projector_from_cache = true;
  } else {
    run.proj = ordinary_projector(run.kb, run.up, cfg.threads);
    detail::cache_write(dir, {key, run.proj.e_matrix, run.proj.stabilization_exponent}, "e");
  }
  run.hecke = hecke_operators(cfg, run.kb);
  run.extraction = ordinary_eigensystems(run.proj, run.kb, run.hecke, cfg.threads);
  return run;
}

inline OrdinaryRun run_ordinary(const Config& cfg) { return run_ordinary(cfg, load_sources(cfg)); }

/// Extracted systems plus, for each, every ordinary system sharing its T_q
/// eigenvalues; this recovers companions whose U_p eigenvalue is not
/// separated by the characteristic polynomial mod p.
inline std::vector<EigenSystem> systems_with_companions(const OrdinaryRun& run, const Config& cfg) {
  std::vector<EigenSystem> out = run.extraction.systems;
  const auto& ops = run.hecke;
  for (const auto& f : run.extraction.systems) {
    std::vector<Residue> values;
    for (const auto& op : ops)
      if (op.q <= f.trunc()) values.push_back(f.a[static_cast<std::size_t>(op.q)]);
    if (values.size() != ops.size()) continue;
    for (auto& g : ordinary_eigensystems_with_hecke_data(run.proj, run.kb, ops, values, cfg.threads))
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const EigenSystem& x, const EigenSystem& y) {
    return std::tie(x.up_eigenvalue, x.a) < std::tie(y.up_eigenvalue, y.a);
  });
  return out;
}

struct WeightOneOutcome {
  std::vector<EigenSystem> systems;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<WeightOneCertificate> certificates;
  std::vector<std::string> diagnostics;

  int exit_code() const {
    for (const auto& c : certificates)
      if (c.valid()) return Ok;
    return ChecksFailed;
  }
};

inline WeightOneOutcome certify_systems(std::vector<EigenSystem> systems, const BasisMatrix& classical) {
  WeightOneOutcome out;
  out.systems = std::move(systems);
  out.pairs = pair_find(out.systems);
  for (const auto& [i, j] : out.pairs) out.certificates.push_back(certify_pair(out.systems[i], out.systems[j], classical));
  return out;
}

inline WeightOneOutcome run_weight_one(const Config& cfg, const BasisMatrix& classical) {
  OrdinaryRun run = run_ordinary(cfg);
  WeightOneOutcome out = certify_systems(systems_with_companions(run, cfg), classical);
  out.diagnostics = run.extraction.diagnostics;
  return out;
}

inline io::Report certificate_report(const WeightOneCertificate& c) {
  io::Report r = c.checks;
  r.set("alpha", std::to_string(c.alpha));
  r.set("beta", std::to_string(c.beta));
  r.set("effective_precision", std::to_string(c.effective_precision));
  r.set("residual_valuation", std::to_string(c.classicality.membership.residual_valuation));
  std::string coords;
  for (auto x : c.classicality.membership.coords) coords += (coords.empty() ? "" : ",") + std::to_string(x);
  r.set("coordinates", coords.empty() ? "-" : coords);
  r.set("verdict", c.valid() ? "classical" : (c.vacuous() ? "vacuous" : "not-classical"));
  return r;
}

}  // namespace pmf::pipeline
