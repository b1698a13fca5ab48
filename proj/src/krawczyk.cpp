#include "ccbif/krawczyk.h"

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>

namespace ccbif {

namespace {

using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

std::string fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hex_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", d);
  return buf;
}

nlohmann::json box_json_exact(const Box& b) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : b) {
    nlohmann::json e = x.to_json();
    e["lo_hex"] = x.lo_hex();
    e["hi_hex"] = x.hi_hex();
    j.push_back(e);
  }
  return j;
}

Box box_from_exact(const nlohmann::json& j, mpfr_prec_t prec) {
  Box b;
  for (const auto& e : j) {
    if (e.contains("lo_hex"))
      b.push_back(Interval::from_hex(e.at("lo_hex").get<std::string>(), e.at("hi_hex").get<std::string>(), prec));
    else
      b.push_back(Interval::from_json(e, prec));
  }
  return b;
}

bool same_bits(const Box& a, const Box& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

// K(c, X) = c − C·f(c) + (I − C·J(X))·(X − c)
Box krawczyk_image(const SquareSystem& f, const Box& c, const Box& X,
                   const std::vector<std::vector<Interval>>& C) {
  const std::size_t n = f.dim();
  Box fc = f.eval(c);
  IntervalMatrix J = f.jacobian(X);
  Box K(n);
  for (std::size_t i = 0; i < n; ++i) {
    Interval acc = c[i];
    for (std::size_t j = 0; j < n; ++j) acc -= C[i][j] * fc[j];
    for (std::size_t j = 0; j < n; ++j) {
      Interval m = Interval(i == j ? 1 : 0);
      for (std::size_t k = 0; k < n; ++k) m -= C[i][k] * J[k][j];
      acc += m * (X[j] - c[j]);
    }
    K[i] = acc;
  }
  return K;
}

}  // namespace

Interval to_interval(const Real& x) { return Interval(x.backend().data(), x.backend().data()); }

Real to_real(const Interval& x) {
  Real r;
  x.mid(r.backend().data());
  return r;
}

std::vector<Real> to_reals(const std::vector<double>& x) { return {x.begin(), x.end()}; }

Box thin_box(const std::vector<Real>& x) {
  Box b;
  for (const auto& v : x) b.push_back(to_interval(v));
  return b;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::UniqueZero: return "unique-zero";
    case Verdict::NoZero: return "no-zero";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "unique-zero") return Verdict::UniqueZero;
  if (s == "no-zero") return Verdict::NoZero;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

nlohmann::json KrawczykCertificate::to_json() const {
  nlohmann::json j;
  j["system_id"] = system_id;
  j["verdict"] = ccbif::to_string(verdict);
  j["precision_bits"] = precision;
  j["radius"] = radius;
  j["radius_hex"] = hex_double(radius);
  j["center"] = box_json_exact(center);
  j["input_box"] = box_json_exact(input);
  j["image_box"] = box_json_exact(image);
  if (!enclosure.empty()) j["enclosure"] = box_json_exact(enclosure);
  j["preconditioner_hash"] = preconditioner_hash;
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

KrawczykCertificate KrawczykCertificate::from_json(const nlohmann::json& j) {
  KrawczykCertificate c;
  c.system_id = j.at("system_id").get<std::string>();
  c.verdict = parse_verdict(j.at("verdict").get<std::string>());
  c.precision = j.at("precision_bits").get<mpfr_prec_t>();
  c.radius = std::strtod(j.at("radius_hex").get<std::string>().c_str(), nullptr);
  c.center = box_from_exact(j.at("center"), c.precision);
  c.input = box_from_exact(j.at("input_box"), c.precision);
  c.image = box_from_exact(j.at("image_box"), c.precision);
  if (j.contains("enclosure")) c.enclosure = box_from_exact(j.at("enclosure"), c.precision);
  c.preconditioner_hash = j.value("preconditioner_hash", "");
  c.reason = j.value("reason", "");
  return c;
}

std::vector<std::vector<Real>> midpoint_inverse(const IntervalMatrix& a, bool* ok) {
  const std::size_t n = a.size();
  MatR m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(Eigen::Index(i), Eigen::Index(j)) = to_real(a[i][j]);
  Eigen::FullPivLU<MatR> lu(m);
  *ok = lu.isInvertible();
  std::vector<std::vector<Real>> out(n, std::vector<Real>(n));
  if (!*ok) return out;
  MatR inv = lu.inverse();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = inv(Eigen::Index(i), Eigen::Index(j));
  return out;
}

std::vector<Real> newton_refine(const SquareSystem& f, std::vector<Real> y, bool* converged, int max_iter) {
  const std::size_t n = f.dim();
  *converged = false;
  const Real eps = boost::multiprecision::pow(Real(2), -int(default_precision()) + 8);
  Real prev_norm = -1;
  for (int it = 0; it < max_iter; ++it) {
    Box yb = thin_box(y);
    Box fy = f.eval(yb);
    IntervalMatrix J = f.jacobian(yb);
    MatR m(n, n);
    VecR b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b(Eigen::Index(i)) = to_real(fy[i]);
      for (std::size_t j = 0; j < n; ++j) m(Eigen::Index(i), Eigen::Index(j)) = to_real(J[i][j]);
    }
    Eigen::PartialPivLU<MatR> lu(m);
    VecR d = lu.solve(b);
    Real dn = 0, yn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] -= d(Eigen::Index(i));
      dn = std::max<Real>(dn, abs(d(Eigen::Index(i))));
      yn = std::max<Real>(yn, abs(y[i]));
    }
    if (dn <= eps * (1 + yn)) {
      *converged = true;
      return y;
    }
    // Quadratic convergence stalled at working-precision noise.
    if (prev_norm > 0 && dn > prev_norm && dn < 1e-20 * (1 + yn)) {
      *converged = true;
      return y;
    }
    prev_norm = dn;
  }
  return y;
}

KrawczykCertificate krawczyk(const SquareSystem& f, const std::vector<Real>& x, double r,
                             mpfr_prec_t precision) {
  PrecisionScope scope(precision);
  const std::size_t n = f.dim();
  KrawczykCertificate cert;
  cert.system_id = f.id();
  cert.precision = precision;
  cert.radius = r;
  // The centre is rounded to the working precision so that it is a point box.
  for (const auto& v : x) {
    mpfr_t c;
    mpfr_init2(c, precision);
    mpfr_set(c, v.backend().data(), MPFR_RNDN);
    cert.center.emplace_back(c, c, precision);
    mpfr_clear(c);
  }
  cert.input = make_box(cert.center, r);

  try {
  Box range = f.eval(cert.input);
  for (std::size_t i = 0; i < n; ++i)
    if (!range[i].contains_zero()) {
      cert.verdict = Verdict::NoZero;
      cert.reason = "component " + std::to_string(i) + " of the range excludes 0";
      cert.image = range;
      return cert;
    }

  bool ok = false;
  auto Cr = midpoint_inverse(f.jacobian(cert.center), &ok);
  if (!ok) {
    cert.reason = "singular midpoint Jacobian";
    return cert;
  }
  std::string hx;
  std::vector<std::vector<Interval>> C(n, std::vector<Interval>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      C[i][j] = to_interval(Cr[i][j]);
      hx += C[i][j].lo_hex();
    }
  cert.preconditioner_hash = fnv1a(hx);

  cert.image = krawczyk_image(f, cert.center, cert.input, C);
  if (strictly_contains(cert.input, cert.image)) {
    cert.verdict = Verdict::UniqueZero;
    Box X(n);
    for (std::size_t i = 0; i < n; ++i) X[i] = cert.image[i].intersect(cert.input[i]);
    // Iterated Krawczyk contraction for a tight enclosure.
    for (int it = 0; it < 30; ++it) {
      Box c = mid(X);
      Box K = krawczyk_image(f, c, X, C);
      if (!intersects(K, X)) break;
      Box Y(n);
      for (std::size_t i = 0; i < n; ++i) Y[i] = K[i].intersect(X[i]);
      double w0 = max_width(X), w1 = max_width(Y);
      X = std::move(Y);
      if (!(w1 < 0.5 * w0)) break;
    }
    cert.enclosure = X;
  } else if (!intersects(cert.input, cert.image)) {
    cert.verdict = Verdict::NoZero;
    cert.reason = "K is disjoint from the input box";
  } else {
    cert.reason = "K not contained in the interior of the input box";
  }
  } catch (const std::domain_error& e) {
    cert.verdict = Verdict::Inconclusive;
    cert.reason = e.what();
  }
  return cert;
}

KrawczykCertificate krawczyk_sweep(const SquareSystem& f, const std::vector<Real>& x, mpfr_prec_t precision,
                                   mpfr_prec_t max_precision, std::vector<double> radii) {
  KrawczykCertificate last;
  for (mpfr_prec_t p = precision; p <= max_precision; p *= 2) {
    for (double r : radii) {
      last = krawczyk(f, x, r, p);
      if (last.verdict == Verdict::UniqueZero) return last;
    }
    if (last.reason == "singular midpoint Jacobian") break;
  }
  return last;
}

bool verify_krawczyk(const SquareSystem& f, const KrawczykCertificate& cert, std::string* why) {
  PrecisionScope scope(cert.precision);
  std::vector<Real> x;
  for (const auto& c : cert.center) {
    if (!c.is_thin()) {
      if (why) *why = "centre is not a point";
      return false;
    }
    x.push_back(to_real(c));
  }
  KrawczykCertificate again = krawczyk(f, x, cert.radius, cert.precision);
  if (again.verdict != cert.verdict) {
    if (why) *why = "verdict differs: " + to_string(again.verdict);
    return false;
  }
  if (!same_bits(again.input, cert.input) || !same_bits(again.image, cert.image)) {
    if (why) *why = "recomputed boxes differ";
    return false;
  }
  if (cert.verdict == Verdict::UniqueZero && !strictly_contains(cert.input, cert.image)) {
    if (why) *why = "image not interior";
    return false;
  }
  return true;
}

std::string fingerprint(const KrawczykCertificate& cert) {
  std::string s = cert.system_id;
  for (const auto& v : cert.enclosure) s += v.lo_hex() + v.hi_hex();
  return "kz-" + fnv1a(s).substr(0, 12);
}

}  // namespace ccbif
