#include "chebiv/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace chebiv {

namespace {

constexpr const char* kMagic = "CHEB-IV v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_cheb(std::ostream& os, const char* tag, const Cheb1D& p) {
  os << tag << ' ' << p.coeffs.size() << ' ' << fmt(p.interval.lo) << ' '
     << fmt(p.interval.hi);
  for (double a : p.coeffs) os << ' ' << fmt(a);
  os << '\n';
}

void put_lowrank(std::ostream& os, const LowRank2D& lr) {
  os << "lowrank " << lr.rank() << ' ' << fmt(lr.iv1.lo) << ' '
     << fmt(lr.iv1.hi) << ' ' << fmt(lr.iv2.lo) << ' ' << fmt(lr.iv2.hi)
     << '\n';
  os << "weights";
  for (double w : lr.weights) os << ' ' << fmt(w);
  os << '\n';
  for (const auto& r : lr.rows) put_cheb(os, "row", r);
  for (const auto& c : lr.cols) put_cheb(os, "col", c);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    while (std::getline(in_, s)) {
      ++line_no_;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      if (!s.empty()) return s;
    }
    fail("unexpected end of file");
    return {};
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError("model file, line " + std::to_string(line_no_) + ": " +
                      why);
  }

  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(Reader& r, const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') r.fail("bad number '" + tok + "'");
  return v;
}

long parse_long(Reader& r, const std::string& tok) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') r.fail("bad integer '" + tok + "'");
  return v;
}

Cheb1D get_cheb(Reader& r, const char* tag) {
  const auto toks = split(r.line());
  if (toks.size() < 4 || toks[0] != tag) {
    r.fail(std::string("expected '") + tag + "' record");
  }
  const long n = parse_long(r, toks[1]);
  if (n < 1 || toks.size() != static_cast<std::size_t>(4 + n)) {
    r.fail("coefficient count mismatch");
  }
  Cheb1D p;
  p.interval = {parse_double(r, toks[2]), parse_double(r, toks[3])};
  p.coeffs.resize(n);
  for (long i = 0; i < n; ++i) p.coeffs[i] = parse_double(r, toks[4 + i]);
  return p;
}

LowRank2D get_lowrank(Reader& r) {
  auto toks = split(r.line());
  if (toks.size() != 6 || toks[0] != "lowrank") r.fail("expected 'lowrank'");
  const long rank = parse_long(r, toks[1]);
  if (rank < 1) r.fail("rank must be >= 1");
  LowRank2D lr;
  lr.iv1 = {parse_double(r, toks[2]), parse_double(r, toks[3])};
  lr.iv2 = {parse_double(r, toks[4]), parse_double(r, toks[5])};
  toks = split(r.line());
  if (toks.size() != static_cast<std::size_t>(1 + rank) ||
      toks[0] != "weights") {
    r.fail("expected 'weights' with one entry per rank");
  }
  for (long i = 0; i < rank; ++i) {
    lr.weights.push_back(parse_double(r, toks[1 + i]));
  }
  for (long i = 0; i < rank; ++i) lr.rows.push_back(get_cheb(r, "row"));
  for (long i = 0; i < rank; ++i) lr.cols.push_back(get_cheb(r, "col"));
  lr.pack();
  return lr;
}

void check_magic(Reader& r) {
  const std::string m = r.line();
  if (m != kMagic) {
    r.fail("version mismatch: expected '" + std::string(kMagic) + "', found '" +
           m + "'");
  }
}

}  // namespace

std::string serialize_surface(const SurfaceModel& m) {
  std::ostringstream os;
  os << kMagic << "\ntype surface\n";
  os << "preset " << preset_name(m.preset) << '\n';
  os << "tol " << fmt(preset_tol(m.preset)) << '\n';
  os << "delta " << fmt(m.curves.delta) << '\n';
  os << "oracle_tol " << fmt(m.oracle_tol) << '\n';
  os << "timestamp " << (m.timestamp.empty() ? "-" : m.timestamp) << '\n';
  const auto& c = m.curves;
  os << "curves " << fmt(c.vmin_a) << ' ' << fmt(c.vmin_b) << ' '
     << fmt(c.v1_a) << ' ' << fmt(c.v1_b) << ' ' << fmt(c.v2_a) << ' '
     << fmt(c.v2_b) << ' ' << fmt(c.v_max) << ' ' << fmt(c.x_range.lo) << ' '
     << fmt(c.x_range.hi) << ' ' << fmt(c.x_split) << '\n';
  put_cheb(os, "boundary_c1", m.boundary.c1);
  put_cheb(os, "boundary_c2", m.boundary.c2);
  put_cheb(os, "boundary_cmax", m.boundary.c_max);
  for (int a = 0; a < 4; ++a) {
    os << "area " << area_name(static_cast<AreaId>(a)) << " rank "
       << m.info[a].rank << " n1 " << m.info[a].order_price << " n2 "
       << m.info[a].order_x << " residual " << fmt(m.info[a].residual) << '\n';
    put_lowrank(os, m.areas[a]);
  }
  os << "end\n";
  return os.str();
}

SurfaceModel deserialize_surface(std::istream& in) {
  Reader r(in);
  check_magic(r);
  if (r.line() != "type surface") r.fail("expected 'type surface'");
  SurfaceModel m;

  auto toks = split(r.line());
  if (toks.size() != 2 || toks[0] != "preset" ||
      !preset_from_name(toks[1], &m.preset)) {
    r.fail("expected 'preset low|medium|high'");
  }
  toks = split(r.line());
  if (toks.size() != 2 || toks[0] != "tol") r.fail("expected 'tol'");
  toks = split(r.line());
  if (toks.size() != 2 || toks[0] != "delta") r.fail("expected 'delta'");
  m.curves.delta = parse_double(r, toks[1]);
  toks = split(r.line());
  if (toks.size() != 2 || toks[0] != "oracle_tol") r.fail("expected 'oracle_tol'");
  m.oracle_tol = parse_double(r, toks[1]);
  toks = split(r.line());
  if (toks.size() != 2 || toks[0] != "timestamp") r.fail("expected 'timestamp'");
  m.timestamp = toks[1] == "-" ? "" : toks[1];

  toks = split(r.line());
  if (toks.size() != 11 || toks[0] != "curves") r.fail("expected 'curves'");
  auto& c = m.curves;
  c.vmin_a = parse_double(r, toks[1]);
  c.vmin_b = parse_double(r, toks[2]);
  c.v1_a = parse_double(r, toks[3]);
  c.v1_b = parse_double(r, toks[4]);
  c.v2_a = parse_double(r, toks[5]);
  c.v2_b = parse_double(r, toks[6]);
  c.v_max = parse_double(r, toks[7]);
  c.x_range = {parse_double(r, toks[8]), parse_double(r, toks[9])};
  c.x_split = parse_double(r, toks[10]);

  m.boundary.c1 = get_cheb(r, "boundary_c1");
  m.boundary.c2 = get_cheb(r, "boundary_c2");
  m.boundary.c_max = get_cheb(r, "boundary_cmax");

  for (int a = 0; a < 4; ++a) {
    toks = split(r.line());
    if (toks.size() != 10 || toks[0] != "area" ||
        toks[1] != area_name(static_cast<AreaId>(a))) {
      r.fail("expected area header for " +
             std::string(area_name(static_cast<AreaId>(a))));
    }
    m.info[a].rank = static_cast<int>(parse_long(r, toks[3]));
    m.info[a].order_price = static_cast<int>(parse_long(r, toks[5]));
    m.info[a].order_x = static_cast<int>(parse_long(r, toks[7]));
    m.info[a].residual = parse_double(r, toks[9]);
    m.areas[a] = get_lowrank(r);
  }
  if (r.line() != "end") r.fail("expected 'end'");
  return m;
}

std::string serialize_laplace(const LaplaceSurface& s) {
  std::ostringstream os;
  os << kMagic << "\ntype laplace\n";
  os << "domain " << fmt(s.x_range.lo) << ' ' << fmt(s.x_range.hi) << ' '
     << fmt(s.v_lo) << ' ' << fmt(s.v_hi) << '\n';
  os << "tol " << fmt(s.tol) << " residual " << fmt(s.residual) << " grid "
     << s.grid_order << '\n';
  put_lowrank(os, s.interp);
  os << "end\n";
  return os.str();
}

LaplaceSurface deserialize_laplace(std::istream& in) {
  Reader r(in);
  check_magic(r);
  if (r.line() != "type laplace") r.fail("expected 'type laplace'");
  LaplaceSurface s;
  auto toks = split(r.line());
  if (toks.size() != 5 || toks[0] != "domain") r.fail("expected 'domain'");
  s.x_range = {parse_double(r, toks[1]), parse_double(r, toks[2])};
  s.v_lo = parse_double(r, toks[3]);
  s.v_hi = parse_double(r, toks[4]);
  toks = split(r.line());
  if (toks.size() != 6 || toks[0] != "tol" || toks[2] != "residual" ||
      toks[4] != "grid") {
    r.fail("expected 'tol ... residual ... grid ...'");
  }
  s.tol = parse_double(r, toks[1]);
  s.residual = parse_double(r, toks[3]);
  s.grid_order = static_cast<int>(parse_long(r, toks[5]));
  s.interp = get_lowrank(r);
  if (r.line() != "end") r.fail("expected 'end'");
  return s;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {
template <typename T, T (*Parse)(std::istream&)>
T load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file: " + path);
  return Parse(in);
}
}  // namespace

SurfaceModel load_surface_file(const std::string& path) {
  return load_file<SurfaceModel, deserialize_surface>(path);
}

LaplaceSurface load_laplace_file(const std::string& path) {
  return load_file<LaplaceSurface, deserialize_laplace>(path);
}

}  // namespace chebiv
