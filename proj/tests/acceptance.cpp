#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pmf/family.hpp"
#include "pmf/io.hpp"
#include "pmf/pipeline.hpp"
#include "pmf/selftest.hpp"

using namespace pmf;

namespace {

constexpr std::uint64_t seed = selftest::default_seed;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s (%.1fs) %s\n", n, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

pipeline::Config level11(int weight, int threads, int depth = -1) {
  const PrimeContext ctx(5, 4, 250);
  return {ctx, 11, DirichletCharacter::trivial(ctx), weight, depth, std::string(PMF_FIXTURES) + "/level11_p5",
          std::nullopt, threads, {}};
}

std::string projector_bytes(int threads) {
  std::stringstream s;
  for (const auto& t : selftest::projector_trials(PrimeContext(5, 4, 1), 50, seed, threads))
    io::write_mfx(s, {io::MatrixKey{5, 4, 0, 1, 0, "trivial", 0}, t.e, std::nullopt});
  return s.str();
}

std::string stabilization_bytes() {
  std::stringstream s;
  const PrimeContext ctx(13, 5, 300);
  const auto st = selftest::stabilize(selftest::level23_form(ctx), DirichletCharacter::kronecker(-23, ctx), 1);
  io::write_mfe(s, st.g_alpha);
  io::write_mfe(s, st.g_beta);
  io::write_mfr(s, selftest::stabilization_round_trip(ctx));
  return s.str();
}

std::string ordinary_bytes(const pipeline::OrdinaryRun& run) {
  std::stringstream s;
  io::write_mfx(s, {io::MatrixKey{5, 4, 250, 11, 2, "trivial", run.kb.depth}, run.up, std::nullopt});
  io::write_mfx(s, {io::MatrixKey{5, 4, 250, 11, 2, "trivial", run.kb.depth}, run.proj.e_matrix,
                    run.proj.stabilization_exponent});
  for (const auto& e : run.extraction.systems) io::write_mfe(s, e);
  return s.str();
}

std::string family_bytes(const FamilyMatch& m) {
  std::stringstream s;
  for (const auto& p : m.pairs) {
    io::write_mfe(s, p.a);
    io::write_mfe(s, p.b);
    s << "depth=" << p.depth << '\n';
  }
  return s.str();
}

}  // namespace

int main() {
  criterion(1, [] {
    const io::Check c = selftest::projection_identities(PrimeContext(5, 4, 200), 200, seed);
    return Outcome{c.pass, "200 series at p=5 N=4 M=200"};
  });

  criterion(2, [] {
    const io::Check c = selftest::eisenstein_congruence({5, 7, 11, 13}, 4, 200);
    bool first = true;
    std::string vals;
    for (std::int64_t p : {5, 7, 11, 13}) {
      const PrimeContext ctx(p, 4, 200);
      const int v = ctx.valuation(eisenstein_E(ctx)[1]);
      first = first && v == 1;
      vals += " v_" + std::to_string(p) + "(a_1)=" + std::to_string(v);
    }
    const bool a1 = eisenstein_E(PrimeContext(5, 4, 1))[1] == 240;
    return Outcome{c.pass && first && a1, "a_1=240 at p=5;" + vals};
  });

  criterion(3, [] {
    int bad = 0;
    for (const auto& t : selftest::projector_trials(PrimeContext(5, 4, 1), 50, seed)) bad += !t.ok();
    const PrimeContext ctx(5, 2, 1);
    Matrix a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(1, 1) = 5;
    Matrix expected(2, 2);
    expected(0, 0) = 1;
    expected(0, 1) = 6;
    const bool worked = ordinary_projector(a, ctx).e_matrix == expected;
    return Outcome{bad == 0 && worked, std::to_string(50 - bad) + "/50 synthetic, worked 2x2 " + (worked ? "ok" : "wrong")};
  });

  criterion(4, [] {
    const io::Report r = selftest::stabilization_round_trip(PrimeContext(13, 5, 300));
    std::string detail;
    for (const auto& c : r.checks) detail += c.name + "=" + (c.pass ? "ok " : "FAIL ");
    for (const auto& [k, v] : r.values) detail += k + "=" + v + " ";
    return Outcome{r.all_pass() && r.checks.size() == 6, detail};
  });

  criterion(5, [] {
    const auto cfg = level11(2, 1);
    const auto sources = pipeline::load_sources(cfg);
    const auto run = pipeline::run_ordinary(cfg, sources);
    std::vector<QExpansion> images;
    for (const auto& f : sources[0].rows()) {
      QExpansion g = ordinary_projection_of_form(f, run.kb, run.proj);
      if (!g.is_zero()) images.push_back(g);
    }
    const std::size_t classical_rank = images.empty() ? 0 : echelonize(images).rank();
    const QExpansion newform = io::load_mfq(std::string(PMF_FIXTURES) + "/level11_p5/newform_k2.mfq", PrimeContext(5, 4, 250));
    bool match = false;
    std::string up;
    for (const auto& e : run.extraction.systems) {
      up += std::to_string(e.up_eigenvalue) + " ";
      bool ok = e.precision == 4;
      for (std::int64_t q = 2; q <= 50; ++q)
        if (is_prime(q) && q != 5 && q != 11) ok = ok && e.a[q] == newform[q];
      match = match || ok;
    }
    const auto deeper = pipeline::run_ordinary(level11(2, 1, cfg.katz_depth() + 1));
    const bool stable = deeper.proj.rank == run.proj.rank;
    return Outcome{classical_rank == 1 && run.proj.rank == 4 && match && stable,
                   "rank(e|S_2(11))=" + std::to_string(classical_rank) + " rank(e)=" + std::to_string(run.proj.rank) +
                       " rank at J=" + std::to_string(cfg.katz_depth() + 1) + ": " + std::to_string(deeper.proj.rank) +
                       " up: " + up + "newform match " + (match ? "yes" : "no")};
  });

  criterion(6, [] {
    const auto m = family_match(pipeline::run_ordinary(level11(2, 1)).extraction.systems,
                                pipeline::run_ordinary(level11(6, 1)).extraction.systems);
    std::vector<int> depths;
    for (const auto& p : m.pairs) depths.push_back(p.depth);
    return Outcome{m.bijective() && depths == std::vector<int>{1, 1}, "depths " + list(depths)};
  });

  criterion(7, [] {
    const PrimeContext ctx(13, 5, 300);
    const auto chi = DirichletCharacter::kronecker(-23, ctx);
    const auto st = selftest::stabilize(selftest::level23_form(ctx), chi, 1);
    const bool clean = check_companion_eigensystems(st.g_alpha, st.g_beta, trivial_twist(), chi(13)).holds();
    int caught = 0, tried = 0;
    for (std::int64_t m = 1; m <= 300; ++m) {
      if (m % 13 == 0) continue;
      ++tried;
      EigenSystem g = st.g_beta;
      g.a[m] = ctx.add(g.a[m], 1 + m % 12);
      const auto r = check_companion_eigensystems(st.g_alpha, g, trivial_twist(), chi(13));
      const bool first_fails = !r.checks.checks[0].pass && r.checks.values[0].second == std::to_string(m);
      caught += !r.holds() && first_fails;
    }
    return Outcome{clean && caught == tried,
                   std::string("clean ") + (clean ? "holds" : "fails") + ", perturbations caught " +
                       std::to_string(caught) + "/" + std::to_string(tried)};
  });

  criterion(8, [] {
    const bool c3 = projector_bytes(1) == projector_bytes(8);
    const bool c4 = stabilization_bytes() == stabilization_bytes();
    const auto r1 = pipeline::run_ordinary(level11(2, 1));
    const auto r8 = pipeline::run_ordinary(level11(2, 8));
    const bool c5 = ordinary_bytes(r1) == ordinary_bytes(r8);
    const auto f1 = family_match(r1.extraction.systems, pipeline::run_ordinary(level11(6, 1)).extraction.systems);
    const auto f8 = family_match(r8.extraction.systems, pipeline::run_ordinary(level11(6, 8)).extraction.systems);
    const bool c6 = family_bytes(f1) == family_bytes(f8);
    auto yn = [](bool b) { return b ? "same" : "DIFFER"; };
    return Outcome{c3 && c4 && c5 && c6, std::string("projector ") + yn(c3) + ", stabilization " + yn(c4) +
                                             ", ordinary " + yn(c5) + ", family " + yn(c6)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
