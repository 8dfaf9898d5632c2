#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmf/family.hpp"
#include "pmf/generators.hpp"
#include "pmf/io.hpp"
#include "pmf/pipeline.hpp"
#include "pmf/selftest.hpp"

namespace {

using namespace pmf;
using nlohmann::json;

struct Globals {
  std::int64_t prime = 5;
  int prec = 4;
  int qprec = 200;
  std::int64_t level = 11;
  std::string character = "trivial";
  std::string fixtures = "fixtures";
  std::optional<std::string> cache;
  std::string out;
  int threads = 1;
  bool json = false;

  PrimeContext ctx() const { return PrimeContext(prime, prec, qprec); }
};

json report_json(const io::Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"precision", c.precision}});
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  return {{"checks", checks}, {"values", values}, {"all_pass", r.all_pass()}};
}

std::string mfr_text(const io::Report& r) {
  std::ostringstream ss;
  io::write_mfr(ss, r);
  return ss.str();
}

void emit(const Globals& g, const io::Report& r) {
  if (g.json)
    std::cout << report_json(r).dump(2) << '\n';
  else
    std::cout << mfr_text(r);
}

std::string out_dir(const Globals& g) {
  const std::string dir = g.out.empty() ? "." : g.out;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = io::detail::open_out(path);
  out << text;
}

void write_report(const std::string& path, const io::Report& r) { write_text(path, mfr_text(r)); }

/// Level >= 5, prime to p, p >= 5.
void validate_run(const Globals& g) {
  if (g.prime < 5) fail(ErrorKind::BadPrime, "p must be at least 5");
  if (g.level < 5) fail(ErrorKind::InvalidArgument, "level must be at least 5");
  if (gcd(g.level, g.prime) != 1) fail(ErrorKind::NotCoprime, "level must be prime to p");
}

pipeline::Config config(const Globals& g, int weight, int depth, const std::vector<std::int64_t>& hecke) {
  validate_run(g);
  const PrimeContext ctx = g.ctx();
  return {ctx, g.level, DirichletCharacter::parse(g.character, ctx), weight, depth, g.fixtures, g.cache, g.threads,
          hecke};
}

std::string system_line(const EigenSystem& e, int terms) {
  std::ostringstream ss;
  ss << "k=" << e.weight << " up=" << e.up_eigenvalue << " prec=" << e.precision << " a:";
  for (int n = 1; n <= std::min(terms, e.trunc()); ++n) ss << ' ' << e.ctx.centered(e.a[n]);
  return ss.str();
}

void save_systems(const std::string& dir, const std::string& prefix, const std::vector<EigenSystem>& systems) {
  for (std::size_t i = 0; i < systems.size(); ++i)
    io::save_mfe(dir + "/" + prefix + std::to_string(i) + ".mfe", systems[i]);
}

// ---- gen

int cmd_gen_eisenstein(const Globals& g) {
  const QExpansion e = eisenstein_E(g.ctx());
  if (g.out.empty())
    io::write_mfq(std::cout, e);
  else
    io::save_mfq(g.out, e);
  return 0;
}

int cmd_gen_eisenstein_char(const Globals& g, int k, const std::string& psi, const std::string& phi) {
  const PrimeContext ctx = g.ctx();
  const QExpansion e =
      eisenstein_weight_char(k, DirichletCharacter::parse(psi, ctx), DirichletCharacter::parse(phi, ctx), ctx);
  if (g.out.empty())
    io::write_mfq(std::cout, e);
  else
    io::save_mfq(g.out, e);
  return 0;
}

int cmd_gen_theta(const Globals& g, const std::array<std::int64_t, 3>& form, std::optional<std::int64_t> disc) {
  const std::int64_t d = form[1] * form[1] - 4 * form[0] * form[2];
  if (disc && *disc != d)
    fail(ErrorKind::InvalidArgument, "form has discriminant " + std::to_string(d) + ", not " + std::to_string(*disc));
  const QExpansion t = theta_series(form[0], form[1], form[2], g.ctx());
  if (g.out.empty())
    io::write_mfq(std::cout, t);
  else
    io::save_mfq(g.out, t);
  return 0;
}

std::array<std::int64_t, 3> parse_form(const std::string& s) {
  std::array<std::int64_t, 3> f{};
  std::stringstream ss(s);
  std::string item;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!std::getline(ss, item, ',')) fail(ErrorKind::FormatError, "form '" + s + "' needs three coefficients a,b,c");
    try {
      f[i] = std::stoll(item);
    } catch (const std::logic_error&) {
      fail(ErrorKind::FormatError, "bad form coefficient '" + item + "'");
    }
  }
  return f;
}

int cmd_gen_theta_basis(const Globals& g, const std::vector<std::string>& forms) {
  std::vector<std::array<std::int64_t, 3>> fs;
  for (const auto& s : forms) fs.push_back(parse_form(s));
  const BasisMatrix b = selftest::theta_basis(fs, g.ctx());
  if (g.out.empty())
    io::write_mfb(std::cout, b);
  else
    io::write_basis(b, g.out);
  return 0;
}

// ---- pipeline

struct PipelineArgs {
  int weight = 1;
  int depth = -1;
  std::string basis;
  std::vector<std::string> from_eigensystems;
  std::vector<std::int64_t> hecke;
};

int cmd_pipeline(const Globals& g, const PipelineArgs& a) {
  pipeline::WeightOneOutcome outcome;
  std::optional<PrimeContext> basis_ctx;
  if (!a.from_eigensystems.empty()) {
    std::vector<EigenSystem> systems;
    for (const auto& path : a.from_eigensystems) systems.push_back(io::load_mfe(path));
    const auto pairs = pair_find(systems);
    if (pairs.empty()) {
      outcome.systems = std::move(systems);
    } else {
      basis_ctx = systems.front().ctx.with_qprec(systems.front().trunc());
      const std::string path =
          a.basis.empty() ? pipeline::source_path(g.fixtures, systems.front().weight) : a.basis;
      outcome = pipeline::certify_systems(std::move(systems), io::ingest_basis(path, *basis_ctx));
    }
  } else {
    const pipeline::Config cfg = config(g, a.weight, a.depth, a.hecke);
    const std::string path = a.basis.empty() ? pipeline::source_path(g.fixtures, a.weight) : a.basis;
    outcome = pipeline::run_weight_one(cfg, io::ingest_basis(path, cfg.ctx));
  }

  const std::string dir = out_dir(g);
  save_systems(dir, "system_", outcome.systems);
  io::Report summary;
  summary.set("systems", std::to_string(outcome.systems.size()));
  std::string pairs;
  for (const auto& [i, j] : outcome.pairs) pairs += (pairs.empty() ? "" : ";") + std::to_string(i) + "," + std::to_string(j);
  summary.set("pairs", pairs.empty() ? "-" : pairs);
  for (const auto& d : outcome.diagnostics) summary.set("diagnostic", d);
  json certs = json::array();
  for (std::size_t c = 0; c < outcome.certificates.size(); ++c) {
    const auto& cert = outcome.certificates[c];
    const io::Report r = pipeline::certificate_report(cert);
    write_report(dir + "/certificate_" + std::to_string(c) + ".mfr", r);
    io::save_mfq(dir + "/weight_one_" + std::to_string(c) + ".mfq", cert.f);
    summary.add("certificate_" + std::to_string(c), cert.valid(), cert.effective_precision);
    certs.push_back(report_json(r));
  }
  const int code = outcome.exit_code();
  summary.set("exit", std::to_string(code));
  write_report(dir + "/pipeline.mfr", summary);

  if (g.json) {
    json j = report_json(summary);
    j["certificates"] = certs;
    std::cout << j.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < outcome.systems.size(); ++i)
      std::cout << "system " << i << ": " << system_line(outcome.systems[i], 12) << '\n';
    std::cout << "pairs: " << (pairs.empty() ? "none" : pairs) << '\n';
    for (std::size_t c = 0; c < outcome.certificates.size(); ++c)
      std::cout << "certificate " << c << ":\n" << mfr_text(pipeline::certificate_report(outcome.certificates[c]));
    for (const auto& d : outcome.diagnostics) std::cout << "note: " << d << '\n';
  }
  return code;
}

// ---- ordinary, family, projector, stabilization: deterministic output files

io::Report ordinary_report(const pipeline::OrdinaryRun& run) {
  io::Report r;
  r.set("katz_rank", std::to_string(run.kb.flat.rank()));
  r.set("katz_precision_loss", std::to_string(run.kb.flat.precision_loss()));
  r.set("ordinary_rank", std::to_string(run.proj.rank));
  r.set("stabilization", std::to_string(run.proj.stabilization_exponent));
  r.set("eigensystems", std::to_string(run.extraction.systems.size()));
  for (const auto& d : run.extraction.diagnostics) r.set("diagnostic", d);
  return r;
}

int cmd_ordinary(const Globals& g, int weight, int depth, const std::vector<std::int64_t>& hecke) {
  const pipeline::Config cfg = config(g, weight, depth, hecke);
  const pipeline::OrdinaryRun run = pipeline::run_ordinary(cfg);
  const std::string dir = out_dir(g);
  const io::MatrixKey key = pipeline::matrix_key(cfg);
  {
    auto out = io::detail::open_out(dir + "/up.mfx");
    io::write_mfx(out, {key, run.up, std::nullopt});
  }
  {
    auto out = io::detail::open_out(dir + "/e.mfx");
    io::write_mfx(out, {key, run.proj.e_matrix, run.proj.stabilization_exponent});
  }
  save_systems(dir, "system_", run.extraction.systems);
  const io::Report r = ordinary_report(run);
  write_report(dir + "/ordinary.mfr", r);
  if (g.json) {
    std::cout << report_json(r).dump(2) << '\n';
  } else {
    std::cout << mfr_text(r);
    for (const auto& e : run.extraction.systems) std::cout << system_line(e, 12) << '\n';
  }
  return 0;
}

int cmd_family(const Globals& g, const std::vector<int>& weights, int depth, const std::vector<std::int64_t>& hecke) {
  if (weights.size() != 2) fail(ErrorKind::InvalidArgument, "family needs exactly two weights");
  std::vector<std::vector<EigenSystem>> systems;
  for (int k : weights) systems.push_back(pipeline::run_ordinary(config(g, k, depth, hecke)).extraction.systems);
  const FamilyMatch m = family_match(systems[0], systems[1]);
  const std::string dir = out_dir(g);
  io::Report r;
  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    const auto& pr = m.pairs[i];
    r.add("pair_" + std::to_string(i) + "_depth_at_least_1", pr.depth >= 1, pr.depth);
    r.set("pair_" + std::to_string(i), "up " + std::to_string(pr.a.up_eigenvalue) + " ~ " +
                                           std::to_string(pr.b.up_eigenvalue) + " depth " + std::to_string(pr.depth));
    io::save_mfe(dir + "/family_" + std::to_string(i) + "_a.mfe", pr.a);
    io::save_mfe(dir + "/family_" + std::to_string(i) + "_b.mfe", pr.b);
  }
  r.add("bijective", m.bijective(), 0);
  r.set("leftover_a", std::to_string(m.leftover_a.size()));
  r.set("leftover_b", std::to_string(m.leftover_b.size()));
  write_report(dir + "/family.mfr", r);
  emit(g, r);
  return r.all_pass() ? 0 : 1;
}

int cmd_projector(const Globals& g, int count, std::uint64_t seed) {
  const PrimeContext ctx = g.ctx();
  const auto trials = selftest::projector_trials(ctx, count, seed, g.threads);
  const std::string dir = out_dir(g);
  auto out = io::detail::open_out(dir + "/projectors.mfx");
  io::Report r;
  bool ok = true;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    io::write_mfx(out, {{ctx.p(), ctx.nprec(), 0, 1, 0, "synthetic", static_cast<int>(i)}, trials[i].e, std::nullopt});
    ok = ok && trials[i].ok();
  }
  r.add("idempotent_commuting_rank", ok, ctx.nprec());
  r.set("matrices", std::to_string(trials.size()));
  r.set("seed", std::to_string(seed));
  write_report(dir + "/projector.mfr", r);
  emit(g, r);
  return ok ? 0 : 1;
}

int cmd_stabilization(const Globals& g) {
  const PrimeContext ctx = g.ctx();
  const io::Report r = selftest::stabilization_round_trip(ctx);
  const selftest::Stabilization s =
      selftest::stabilize(selftest::level23_form(ctx), DirichletCharacter::kronecker(-23, ctx), 1);
  const std::string dir = out_dir(g);
  io::save_mfe(dir + "/g_alpha.mfe", s.g_alpha);
  io::save_mfe(dir + "/g_beta.mfe", s.g_beta);
  io::save_mfq(dir + "/g.mfq", s.g);
  write_report(dir + "/stabilization.mfr", r);
  emit(g, r);
  return r.all_pass() ? 0 : 1;
}

int cmd_selftest(const Globals& g, std::uint64_t seed, bool break_projection) {
  const io::Report r = selftest::run(seed, break_projection);
  if (!g.out.empty()) write_report(g.out, r);
  emit(g, r);
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic modular forms toolkit"};
  app.require_subcommand(1);
  Globals g;
  std::string cache;
  app.add_option("--prime", g.prime, "p")->capture_default_str();
  app.add_option("--prec", g.prec, "digits N of Z/p^N")->capture_default_str();
  app.add_option("--qprec", g.qprec, "q-expansion truncation M")->capture_default_str();
  app.add_option("--level", g.level, "tame level")->capture_default_str();
  app.add_option("--char", g.character, "trivial | kronecker:<D> | table:<m>:<v_1,...>")->capture_default_str();
  app.add_option("--fixtures", g.fixtures, "directory of classical S<k>.mfb sources")->capture_default_str();
  app.add_option("--cache", cache, "matrix cache directory (MF_CACHE_DIR overrides)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "machine-readable output");

  int code = 0;
  auto guarded = [&](auto&& body) {
    return [&, body]() {
      if (!cache.empty()) g.cache = cache;
      try {
        code = body();
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = pipeline::exit_code_for(e.kind());
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = pipeline::BadInput;
      }
    };
  };

  auto* gen = app.add_subcommand("gen", "generate a q-expansion or basis")->require_subcommand(1);
  gen->fallthrough();
  gen->add_subcommand("eisenstein", "E of weight p-1")->fallthrough()->callback(guarded([&] {
    return cmd_gen_eisenstein(g);
  }));
  int ek = 2;
  std::string psi = "trivial", phi = "trivial";
  auto* ec = gen->add_subcommand("eisenstein-char", "E_k(psi, phi)")->fallthrough();
  ec->add_option("--weight", ek)->required();
  ec->add_option("--psi", psi)->capture_default_str();
  ec->add_option("--phi", phi)->capture_default_str();
  ec->callback(guarded([&] { return cmd_gen_eisenstein_char(g, ek, psi, phi); }));
  std::array<std::int64_t, 3> form{};
  std::optional<std::int64_t> disc;
  auto* th = gen->add_subcommand("theta", "theta series of ax^2+bxy+cy^2")->fallthrough();
  th->add_option("a", form[0])->required();
  th->add_option("b", form[1])->required();
  th->add_option("c", form[2])->required();
  th->add_option("--disc", disc, "expected discriminant");
  th->callback(guarded([&] { return cmd_gen_theta(g, form, disc); }));
  std::vector<std::string> forms;
  auto* tb = gen->add_subcommand("theta-basis", "span of theta differences")->fallthrough();
  tb->add_option("--form", forms, "a,b,c (repeat)")->required();
  tb->callback(guarded([&] { return cmd_gen_theta_basis(g, forms); }));

  PipelineArgs pa;
  auto* pl = app.add_subcommand("pipeline", "weight-one construction and certificate")->fallthrough();
  pl->add_option("--weight", pa.weight)->capture_default_str();
  pl->add_option("--depth", pa.depth, "Katz depth J (default: minimal)");
  pl->add_option("--basis", pa.basis, "classical basis MFB for the certificate");
  pl->add_option("--from-eigensystems", pa.from_eigensystems, "MFE files; skips the Katz stages");
  pl->add_option("--hecke", pa.hecke, "primes q for T_q splitting");
  pl->callback(guarded([&] { return cmd_pipeline(g, pa); }));

  int ow = 2, od = -1;
  std::vector<std::int64_t> oh;
  auto* ord = app.add_subcommand("ordinary", "U_p, e and ordinary eigensystems")->fallthrough();
  ord->add_option("--weight", ow)->capture_default_str();
  ord->add_option("--depth", od, "Katz depth J (default: minimal)");
  ord->add_option("--hecke", oh, "primes q for T_q splitting");
  ord->callback(guarded([&] { return cmd_ordinary(g, ow, od, oh); }));

  std::vector<int> fw{2, 6};
  int fd = -1;
  auto* fam = app.add_subcommand("family", "congruence matching across two weights")->fallthrough();
  fam->add_option("--weights", fw)->expected(2)->capture_default_str();
  fam->add_option("--depth", fd, "Katz depth J (default: minimal)");
  fam->callback(guarded([&] { return cmd_family(g, fw, fd, oh); }));

  int pc = 50;
  std::uint64_t seed = selftest::default_seed;
  auto* pr = app.add_subcommand("projector", "projectors of synthetic matrices")->fallthrough();
  pr->add_option("--count", pc)->capture_default_str();
  pr->add_option("--seed", seed)->capture_default_str();
  pr->callback(guarded([&] { return cmd_projector(g, pc, seed); }));

  app.add_subcommand("stabilization", "level-23 stabilization round trip")->fallthrough()->callback(guarded([&] {
    return cmd_stabilization(g);
  }));

  bool broken = false;
  auto* st = app.add_subcommand("selftest", "built-in invariant suite")->fallthrough();
  st->add_option("--seed", seed)->capture_default_str();
  st->add_flag("--break-projection", broken, "inject a fault into the projection formula check");
  st->callback(guarded([&] { return cmd_selftest(g, seed, broken); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pipeline::BadInput;
  }
  return code;
}
