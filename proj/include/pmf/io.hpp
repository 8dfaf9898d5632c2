#pragma once

// Line-oriented text formats.
//
//   MFQ  q-expansion          MFB  basis of a space       MFE  eigensystem
//   MFX  cached matrix        MFR  check report
//
// Readers that take a PrimeContext adapt the record to it: the file must
// share p and carry at least as many digits and coefficients, which are then
// reduced and truncated.  Readers without one reproduce the record exactly.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmf/character.hpp"
#include "pmf/error.hpp"
#include "pmf/matrix.hpp"
#include "pmf/overconv.hpp"
#include "pmf/qexpansion.hpp"
#include "pmf/spaces.hpp"

namespace pmf::io {

namespace detail {

inline std::string next_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line;
  }
  fail(ErrorKind::FormatError, std::string("unexpected end of file, expected ") + what);
}

/// Parses "k1=v1 k2=v2 ..." into a map; bare words map to "".
inline std::map<std::string, std::string> fields(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) out[tok] = "";
    else out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

inline std::int64_t int_field(const std::map<std::string, std::string>& f, const std::string& key) {
  auto it = f.find(key);
  if (it == f.end()) fail(ErrorKind::FormatError, "missing field '" + key + "'");
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    fail(ErrorKind::FormatError, "field '" + key + "' is not an integer: '" + it->second + "'");
  }
}

inline void expect_magic(std::istream& in, const std::string& magic) {
  const std::string line = next_line(in, magic.c_str());
  if (line != magic + " 1") fail(ErrorKind::FormatError, "expected header '" + magic + " 1', got '" + line + "'");
}

inline std::vector<Residue> residues(const std::string& line, const std::string& prefix, Residue modulus) {
  if (line.rfind(prefix, 0) != 0) fail(ErrorKind::FormatError, "expected '" + prefix + "' line");
  std::istringstream ss(line.substr(prefix.size()));
  std::vector<Residue> out;
  std::string tok;
  while (ss >> tok) {
    if (tok.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorKind::FormatError, "bad residue '" + tok + "'");
    Residue r = std::stoull(tok);
    if (r >= modulus) fail(ErrorKind::FormatError, "residue " + tok + " out of range");
    out.push_back(r);
  }
  return out;
}

inline void write_residues(std::ostream& out, const std::string& prefix, std::span<const Residue> v) {
  out << prefix;
  for (Residue r : v) out << ' ' << r;
  out << '\n';
}

inline PrimeContext read_ring_line(std::istream& in) {
  auto f = fields(next_line(in, "ring line"));
  return PrimeContext(int_field(f, "p"), static_cast<int>(int_field(f, "prec")), static_cast<int>(int_field(f, "qprec")));
}

inline void write_ring_line(std::ostream& out, const PrimeContext& ctx) {
  out << "p=" << ctx.p() << " prec=" << ctx.nprec() << " qprec=" << ctx.qprec() << '\n';
}

inline std::optional<FormMeta> read_meta_line(const std::string& line, const PrimeContext& ctx) {
  auto f = fields(line);
  if (f.count("nometa")) return std::nullopt;
  auto ch = f.find("char");
  if (ch == f.end()) fail(ErrorKind::FormatError, "missing field 'char'");
  return FormMeta{int_field(f, "level"), static_cast<int>(int_field(f, "weight")),
                  DirichletCharacter::parse(ch->second, ctx), f.count("cusp") > 0};
}

inline void write_meta_line(std::ostream& out, const std::optional<FormMeta>& m) {
  if (!m) {
    out << "nometa\n";
    return;
  }
  out << "level=" << m->level << " weight=" << m->weight << " char=" << m->character.spec();
  if (m->cuspidal) out << " cusp";
  out << '\n';
}

inline void require_compatible(const PrimeContext& file, const PrimeContext& target) {
  if (file.p() != target.p())
    fail(ErrorKind::ContextMismatch, "file has p=" + std::to_string(file.p()) + ", run has p=" +
                                         std::to_string(target.p()));
  if (file.nprec() < target.nprec())
    fail(ErrorKind::ContextMismatch, "file carries " + std::to_string(file.nprec()) + " digits, run needs " +
                                         std::to_string(target.nprec()));
  if (file.qprec() < target.qprec())
    fail(ErrorKind::ContextMismatch, "file is truncated at " + std::to_string(file.qprec()) + ", run needs " +
                                         std::to_string(target.qprec()));
}

inline std::vector<Residue> adapt(std::vector<Residue> v, const PrimeContext& target) {
  if (v.size() > static_cast<std::size_t>(target.qprec()) + 1) v.resize(static_cast<std::size_t>(target.qprec()) + 1);
  for (auto& x : v) x %= target.modulus();
  return v;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::MissingSource, "cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  return out;
}

}  // namespace detail

// ---- MFQ

inline void write_mfq(std::ostream& out, const QExpansion& f) {
  out << "MFQ 1\n";
  detail::write_ring_line(out, f.ctx().with_qprec(f.trunc()));
  detail::write_meta_line(out, f.meta());
  detail::write_residues(out, "coeffs:", f.coeffs());
}

inline QExpansion read_mfq(std::istream& in) {
  detail::expect_magic(in, "MFQ");
  const PrimeContext ctx = detail::read_ring_line(in);
  auto meta = detail::read_meta_line(detail::next_line(in, "metadata"), ctx);
  auto c = detail::residues(detail::next_line(in, "coeffs"), "coeffs:", ctx.modulus());
  if (c.size() != static_cast<std::size_t>(ctx.qprec()) + 1)
    fail(ErrorKind::FormatError, "expected " + std::to_string(ctx.qprec() + 1) + " coefficients, found " +
                                     std::to_string(c.size()));
  return QExpansion(ctx, std::move(c), std::move(meta));
}

inline QExpansion read_mfq(std::istream& in, const PrimeContext& ctx) {
  QExpansion raw = read_mfq(in);
  detail::require_compatible(raw.ctx().with_qprec(raw.trunc()), ctx);
  std::optional<FormMeta> meta;
  if (raw.meta())
    meta = FormMeta{raw.meta()->level, raw.meta()->weight,
                    DirichletCharacter::parse(raw.meta()->character.spec(), ctx), raw.meta()->cuspidal};
  return QExpansion(ctx, detail::adapt(raw.coeffs(), ctx), std::move(meta));
}

inline void save_mfq(const std::string& path, const QExpansion& f) {
  auto out = detail::open_out(path);
  write_mfq(out, f);
}

inline QExpansion load_mfq(const std::string& path, const PrimeContext& ctx) {
  auto in = detail::open_in(path);
  return read_mfq(in, ctx);
}

// ---- MFB

inline void write_mfb(std::ostream& out, const BasisMatrix& b) {
  out << "MFB 1\n";
  detail::write_ring_line(out, b.ctx().with_qprec(b.trunc()));
  std::optional<FormMeta> meta;
  if (const auto& d = b.descriptor()) meta = FormMeta{d->level, d->weight, d->character};
  if (!b.rows().empty() && b.rows().front().meta()) meta = b.rows().front().meta();
  detail::write_meta_line(out, meta);
  if (const auto& d = b.descriptor()) {
    if (d->dim) out << "dim=" << *d->dim << '\n';
    if (d->sturm) out << "sturm=" << *d->sturm << '\n';
  }
  out << "rows=" << b.rank() << '\n';
  for (const auto& r : b.rows()) detail::write_residues(out, "coeffs:", r.coeffs());
}

namespace detail {

inline BasisMatrix read_mfb_impl(std::istream& in, const std::optional<PrimeContext>& target) {
  expect_magic(in, "MFB");
  const PrimeContext file = read_ring_line(in);
  if (target) require_compatible(file, *target);
  const PrimeContext ctx = target ? *target : file;
  auto meta = read_meta_line(next_line(in, "metadata"), ctx);
  std::optional<int> dim, sturm;
  std::int64_t rows = -1;
  while (rows < 0) {
    auto f = fields(next_line(in, "rows="));
    if (f.count("dim")) dim = static_cast<int>(int_field(f, "dim"));
    else if (f.count("sturm")) sturm = static_cast<int>(int_field(f, "sturm"));
    else if (f.count("rows")) rows = int_field(f, "rows");
    else fail(ErrorKind::FormatError, "unexpected basis metadata line");
  }
  std::vector<QExpansion> qs;
  for (std::int64_t i = 0; i < rows; ++i) {
    auto c = residues(next_line(in, "coeffs"), "coeffs:", file.modulus());
    if (c.size() != static_cast<std::size_t>(file.qprec()) + 1)
      fail(ErrorKind::FormatError, "row " + std::to_string(i) + " has " + std::to_string(c.size()) +
                                       " coefficients, expected " + std::to_string(file.qprec() + 1));
    qs.emplace_back(ctx, adapt(std::move(c), ctx), meta);
  }
  BasisMatrix b = qs.empty() ? BasisMatrix(ctx, ctx.qprec()) : echelonize(qs);
  if (meta) b.set_descriptor(SpaceDescriptor{meta->level, meta->weight, meta->character, SourceTag::Ingested, dim, sturm});
  if (dim && static_cast<int>(b.rank()) != *dim)
    fail(ErrorKind::RankDeficiency, "basis has rank " + std::to_string(b.rank()) + " but the recorded dimension is " +
                                        std::to_string(*dim));
  return b;
}

}  // namespace detail

inline BasisMatrix read_mfb(std::istream& in) { return detail::read_mfb_impl(in, std::nullopt); }
inline BasisMatrix read_mfb(std::istream& in, const PrimeContext& ctx) { return detail::read_mfb_impl(in, ctx); }

inline void write_basis(const BasisMatrix& b, const std::string& path) {
  auto out = detail::open_out(path);
  write_mfb(out, b);
}

inline BasisMatrix ingest_basis(const std::string& path, const PrimeContext& ctx) {
  auto in = detail::open_in(path);
  return read_mfb(in, ctx);
}

// ---- MFE

inline void write_mfe(std::ostream& out, const EigenSystem& e) {
  out << "MFE 1\n";
  detail::write_ring_line(out, e.ctx.with_qprec(e.trunc()));
  detail::write_meta_line(out, FormMeta{e.level, e.weight, e.character, e.a[0] == 0});
  out << "precision=" << e.precision << " a0=" << e.a[0] << '\n';
  out << "up=" << e.up_eigenvalue << '\n';
  detail::write_residues(out, "a:", std::span<const Residue>(e.a).subspan(1));
}

inline EigenSystem read_mfe(std::istream& in) {
  detail::expect_magic(in, "MFE");
  const PrimeContext ctx = detail::read_ring_line(in);
  auto meta = detail::read_meta_line(detail::next_line(in, "metadata"), ctx);
  if (!meta) fail(ErrorKind::FormatError, "eigensystem needs metadata");
  auto f = detail::fields(detail::next_line(in, "precision"));
  const auto prec = static_cast<int>(detail::int_field(f, "precision"));
  const auto a0 = static_cast<Residue>(detail::int_field(f, "a0"));
  auto u = detail::fields(detail::next_line(in, "up"));
  const auto up = static_cast<Residue>(detail::int_field(u, "up"));
  auto a = detail::residues(detail::next_line(in, "a:"), "a:", ctx.modulus());
  if (a.size() != static_cast<std::size_t>(ctx.qprec()))
    fail(ErrorKind::FormatError, "expected " + std::to_string(ctx.qprec()) + " eigenvalues a_1..a_M");
  if (a0 >= ctx.modulus() || up >= ctx.modulus() || prec < 0 || prec > ctx.nprec())
    fail(ErrorKind::FormatError, "eigensystem field out of range");
  a.insert(a.begin(), a0);
  return EigenSystem{ctx, meta->weight, meta->level, meta->character, up, std::move(a), prec};
}

inline void save_mfe(const std::string& path, const EigenSystem& e) {
  auto out = detail::open_out(path);
  write_mfe(out, e);
}

inline EigenSystem load_mfe(const std::string& path) {
  auto in = detail::open_in(path);
  return read_mfe(in);
}

// ---- MFX

struct MatrixKey {
  std::int64_t p;
  int prec;
  int qprec;
  std::int64_t level;
  int weight;
  std::string character;
  int depth;

  std::string str() const {
    std::ostringstream ss;
    ss << '(' << p << ',' << prec << ',' << qprec << ',' << level << ',' << weight << ',' << character << ',' << depth
       << ')';
    return ss.str();
  }

  /// File-name friendly form of the key.
  std::string stem() const {
    std::string s = "p" + std::to_string(p) + "_N" + std::to_string(prec) + "_M" + std::to_string(qprec) + "_L" +
                    std::to_string(level) + "_k" + std::to_string(weight) + "_J" + std::to_string(depth) + "_";
    for (char c : character) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
    return s;
  }

  friend bool operator==(const MatrixKey&, const MatrixKey&) = default;
};

struct MatrixRecord {
  MatrixKey key;
  Matrix matrix;
  std::optional<int> stabilization;

  friend bool operator==(const MatrixRecord&, const MatrixRecord&) = default;
};

inline void write_mfx(std::ostream& out, const MatrixRecord& r) {
  out << "MFX 1\n" << r.key.str() << '\n' << "n=" << r.matrix.rows() << '\n';
  if (r.stabilization) out << "stabilization=" << *r.stabilization << '\n';
  for (std::size_t i = 0; i < r.matrix.rows(); ++i) {
    for (std::size_t j = 0; j < r.matrix.cols(); ++j) out << (j ? " " : "") << r.matrix(i, j);
    out << '\n';
  }
}

inline MatrixRecord read_mfx(std::istream& in) {
  detail::expect_magic(in, "MFX");
  std::string key = detail::next_line(in, "key");
  if (key.size() < 2 || key.front() != '(' || key.back() != ')') fail(ErrorKind::FormatError, "bad matrix key");
  std::vector<std::string> parts;
  std::stringstream ks(key.substr(1, key.size() - 2));
  for (std::string part; std::getline(ks, part, ',');) parts.push_back(part);
  // the character spec may itself contain commas
  if (parts.size() < 7) fail(ErrorKind::FormatError, "matrix key needs 7 components");
  std::string chi = parts[5];
  for (std::size_t i = 6; i + 1 < parts.size(); ++i) chi += "," + parts[i];
  auto num = [&](const std::string& s) {
    std::map<std::string, std::string> f{{"x", s}};
    return detail::int_field(f, "x");
  };
  MatrixRecord r{MatrixKey{num(parts[0]), static_cast<int>(num(parts[1])), static_cast<int>(num(parts[2])),
                           num(parts[3]), static_cast<int>(num(parts[4])), chi, static_cast<int>(num(parts.back()))},
                 {},
                 std::nullopt};
  const PrimeContext ctx(r.key.p, r.key.prec, std::max(1, r.key.qprec));
  auto f = detail::fields(detail::next_line(in, "n="));
  const auto n = static_cast<std::size_t>(detail::int_field(f, "n"));
  r.matrix = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string line = detail::next_line(in, "matrix row");
    if (line.rfind("stabilization=", 0) == 0 && i == 0 && !r.stabilization) {
      r.stabilization = static_cast<int>(detail::int_field(detail::fields(line), "stabilization"));
      line = detail::next_line(in, "matrix row");
    }
    auto row = detail::residues(line, "", ctx.modulus());
    if (row.size() != n) fail(ErrorKind::FormatError, "matrix row " + std::to_string(i) + " has wrong length");
    std::copy(row.begin(), row.end(), r.matrix.row(i).begin());
  }
  if (n == 0) {
    std::string line;
    if (std::getline(in, line) && line.rfind("stabilization=", 0) == 0)
      r.stabilization = static_cast<int>(detail::int_field(detail::fields(line), "stabilization"));
  }
  return r;
}

// ---- MFR

struct Check {
  std::string name;
  bool pass;
  int precision;

  friend bool operator==(const Check&, const Check&) = default;
};

struct Report {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> values;  // named measurements

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(std::string name, bool pass, int precision) { checks.push_back({std::move(name), pass, precision}); }
  void set(std::string name, std::string value) { values.emplace_back(std::move(name), std::move(value)); }

  friend bool operator==(const Report&, const Report&) = default;
};

inline void write_mfr(std::ostream& out, const Report& r) {
  out << "MFR 1\n";
  for (const auto& c : r.checks) out << "check " << c.name << ' ' << (c.pass ? "pass" : "fail") << " prec=" << c.precision << '\n';
  for (const auto& [k, v] : r.values) out << "value " << k << ' ' << v << '\n';
}

inline Report read_mfr(std::istream& in) {
  detail::expect_magic(in, "MFR");
  Report r;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag, name;
    ss >> tag >> name;
    if (tag == "check") {
      std::string verdict, prec;
      ss >> verdict >> prec;
      if ((verdict != "pass" && verdict != "fail") || prec.rfind("prec=", 0) != 0)
        fail(ErrorKind::FormatError, "bad check line '" + line + "'");
      r.add(name, verdict == "pass", static_cast<int>(detail::int_field(detail::fields(prec), "prec")));
    } else if (tag == "value") {
      std::string rest;
      std::getline(ss, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      r.set(name, rest);
    } else {
      fail(ErrorKind::FormatError, "bad report line '" + line + "'");
    }
  }
  return r;
}

}  // namespace pmf::io
