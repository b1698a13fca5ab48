#include "ccbif/equations.h"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ccbif {

namespace {

const char* kDistNames[6] = {"r12", "r13", "r14", "r23", "r24", "r34"};

Polynomial det(std::vector<std::vector<Polynomial>> a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Polynomial acc(a[0][0].arity());
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(std::move(row));
    }
    Polynomial t = a[0][j] * det(std::move(minor));
    if (j % 2) acc -= t;
    else acc += t;
  }
  return acc;
}

// Cayley-Menger determinant with r_ij placed at variables offset..offset+5.
Polynomial cayley_menger_in(std::size_t arity, std::size_t offset) {
  auto d = [&](int i, int j) {
    Polynomial r = Polynomial::variable(arity, offset + pair_index(i, j));
    return r * r;
  };
  Polynomial zero(arity), one = Polynomial::constant(arity, 1);
  std::vector<std::vector<Polynomial>> a(5, std::vector<Polynomial>(5, zero));
  for (int i = 1; i < 5; ++i) a[0][i] = a[i][0] = one;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) a[i + 1][j + 1] = a[j + 1][i + 1] = d(i, j);
  return det(std::move(a));
}

std::array<Polynomial, 4> mass_polys(const MassParams& mp, std::size_t arity, std::size_t param) {
  Polynomial m = Polynomial::variable(arity, param);
  auto c = [&](const mpq_class& v) { return Polynomial::constant(arity, v); };
  switch (mp.pattern) {
    case MassPattern::ThreeEqual: return {c(1), c(1), c(1), m};
    case MassPattern::TwoPairs: return {c(1), c(1), m, m};
    case MassPattern::General: break;
  }
  return {c(mp.fixed[0]), c(mp.fixed[1]), c(mp.fixed[2]), c(mp.fixed[3])};
}

const std::array<Polynomial, 6>& cayley_menger_gradient() {
  static const std::array<Polynomial, 6> g = [] {
    std::array<Polynomial, 6> out;
    for (int k = 0; k < 6; ++k) out[k] = cayley_menger_polynomial().derivative(k);
    return out;
  }();
  return g;
}

}  // namespace

std::string to_string(MassPattern p) {
  switch (p) {
    case MassPattern::ThreeEqual: return "three-equal";
    case MassPattern::TwoPairs: return "two-pairs";
    case MassPattern::General: return "general";
  }
  return "?";
}

std::string to_string(SystemKind k) { return k == SystemKind::Dziobek ? "dziobek" : "ac"; }

MassPattern parse_mass_pattern(const std::string& s) {
  if (s == "three-equal") return MassPattern::ThreeEqual;
  if (s == "two-pairs") return MassPattern::TwoPairs;
  if (s == "general") return MassPattern::General;
  throw std::invalid_argument("unknown mass family '" + s + "'");
}

SystemKind parse_system_kind(const std::string& s) {
  if (s == "dziobek") return SystemKind::Dziobek;
  if (s == "ac") return SystemKind::AC;
  throw std::invalid_argument("unknown system kind '" + s + "'");
}

int pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  for (int k = 0; k < 6; ++k)
    if (kPairs[k][0] == i && kPairs[k][1] == j) return k;
  throw std::out_of_range("pair_index: not a pair");
}

MassParams MassParams::general(const std::array<mpq_class, 4>& m) {
  for (const auto& v : m)
    if (v <= 0) throw std::domain_error("masses must be positive");
  return {MassPattern::General, m};
}

std::array<double, 4> MassParams::at(double m) const {
  switch (pattern) {
    case MassPattern::ThreeEqual: return {1, 1, 1, m};
    case MassPattern::TwoPairs: return {1, 1, m, m};
    case MassPattern::General: break;
  }
  return {fixed[0].get_d(), fixed[1].get_d(), fixed[2].get_d(), fixed[3].get_d()};
}

std::array<mpq_class, 4> MassParams::at(const mpq_class& m) const {
  switch (pattern) {
    case MassPattern::ThreeEqual: return {1, 1, 1, m};
    case MassPattern::TwoPairs: return {1, 1, m, m};
    case MassPattern::General: break;
  }
  return fixed;
}

nlohmann::json PolySystem::to_json() const {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : equations) eqs.push_back(e.to_json());
  nlohmann::json fixed = nlohmann::json::array();
  for (const auto& f : masses.fixed) fixed.push_back(f.get_str());
  return {{"kind", to_string(kind)},
          {"masses", {{"pattern", to_string(masses.pattern)}, {"fixed", fixed}}},
          {"variables", variables},
          {"equations", eqs}};
}

PolySystem PolySystem::from_json(const nlohmann::json& j) {
  PolySystem s;
  s.kind = parse_system_kind(j.at("kind").get<std::string>());
  s.masses.pattern = parse_mass_pattern(j.at("masses").at("pattern").get<std::string>());
  for (int i = 0; i < 4; ++i) {
    s.masses.fixed[i] = mpq_class(j.at("masses").at("fixed").at(i).get<std::string>(), 10);
    s.masses.fixed[i].canonicalize();
  }
  s.variables = j.at("variables").get<std::vector<std::string>>();
  for (const auto& e : j.at("equations")) s.equations.push_back(Polynomial::from_json(e));
  return s;
}

PolySystem differentiate(const PolySystem& sys, std::span<const unsigned> multi_index) {
  PolySystem d = sys;
  for (auto& e : d.equations) e = e.derivative(multi_index);
  return d;
}

const Polynomial& cayley_menger_polynomial() {
  static const Polynomial s = cayley_menger_in(6, 0);
  return s;
}

double cayley_menger(const std::array<double, 6>& r) {
  return cayley_menger_polynomial().evaluate(std::span<const double>(r));
}

mpq_class cayley_menger(const std::array<mpq_class, 6>& r) {
  return cayley_menger_polynomial().evaluate(std::span<const mpq_class>(r));
}

PolySystem build_dziobek(const MassParams& masses) {
  constexpr std::size_t n = 9, param = 8;
  PolySystem sys;
  sys.kind = SystemKind::Dziobek;
  sys.masses = masses;
  sys.variables = {"lambda0", "mu"};
  for (auto* s : kDistNames) sys.variables.push_back(s);
  sys.variables.push_back("m");

  auto mi = mass_polys(masses, n, param);
  Polynomial total = mi[0] + mi[1] + mi[2] + mi[3];
  Polynomial lambda0 = Polynomial::variable(n, 0), mu = Polynomial::variable(n, 1);
  Polynomial S = cayley_menger_in(n, 2);

  // M·(I − 1) = Σ m_i m_j r_ij² − M
  Polynomial f1 = -total;
  for (int k = 0; k < 6; ++k) {
    Polynomial r = Polynomial::variable(n, 2 + k);
    f1 += mi[kPairs[k][0]] * mi[kPairs[k][1]] * r * r;
  }
  sys.equations.push_back(f1);
  sys.equations.push_back(S);
  // M·r²·∂V/∂r = −M m_i m_j + 2λ₀ m_i m_j r³ + μ M r² ∂S/∂r
  for (int k = 0; k < 6; ++k) {
    Polynomial r = Polynomial::variable(n, 2 + k);
    Polynomial mm = mi[kPairs[k][0]] * mi[kPairs[k][1]];
    Polynomial f = -(total * mm) + mpq_class(2) * lambda0 * mm * r.pow(3) +
                   mu * total * r * r * S.derivative(2 + k);
    sys.equations.push_back(f);
  }
  return sys;
}

PolySystem build_ac(const MassParams& masses) {
  constexpr std::size_t n = 7, param = 6;
  PolySystem sys;
  sys.kind = SystemKind::AC;
  sys.masses = masses;
  for (auto* s : kDistNames) sys.variables.push_back(s);
  sys.variables.push_back("m");

  auto mi = mass_polys(masses, n, param);
  auto rv = [&](int i, int j) { return Polynomial::variable(n, pair_index(i, j)); };
  auto sq = [&](int i, int j) {
    if (i == j) return Polynomial(n);
    Polynomial r = rv(i, j);
    return r * r;
  };
  for (auto [i, j] : kPairs) {
    // Clearing product of r_kl³ over the pairs touching i or j.
    Monomial den;
    for (int k = 0; k < 6; ++k)
      if (kPairs[k][0] == i || kPairs[k][1] == i || kPairs[k][0] == j || kPairs[k][1] == j)
        den = den * Monomial::variable(k, 3);
    Polynomial denp(n);
    denp.add_term(den, 1);
    // den · S_ab with S_ab = r_ab⁻³ − 1
    auto cleared_s = [&](int a, int b) {
      Polynomial p(n);
      if (a == b) return p;
      p.add_term(den.lowered(pair_index(a, b), 3), 1);
      return p - denp;
    };
    Polynomial e(n);
    for (int k = 0; k < 4; ++k) {
      Polynomial term = cleared_s(i, k) * (sq(j, k) - sq(i, k) - sq(i, j)) +
                        cleared_s(j, k) * (sq(i, k) - sq(j, k) - sq(i, j));
      e += mi[k] * term;
    }
    sys.equations.push_back(-e.divided(Monomial::variable(pair_index(i, j), 2)));
  }
  return sys;
}

Q3 equilateral_alpha_cubed(const Q3& m) {
  return Q3(3) * (Q3::sqrt3() * m + Q3(1)) / (m + Q3(3));
}

Q3 equilateral_degenerate_mass() { return Q3(mpq_class(81, 249), mpq_class(64, 249)); }

std::array<double, 6> equilateral_point(double m) {
  if (!(m > 0)) throw std::domain_error("equilateral_point: m must be positive");
  const double s3 = std::sqrt(3.0);
  double a = std::cbrt(3.0 * (s3 * m + 1.0) / (m + 3.0));
  return {a, a, a / s3, a, a / s3, a / s3};
}

double equilateral_jacobian_det(double m) {
  const double s3 = std::sqrt(3.0);
  double f = -249.0 * m + 64.0 * s3 + 81.0;
  return -64.0 * (60.0 * s3 - 133.0) * f * f * m * m * std::pow(m + 3.0, 5) / 20667.0;
}

Q3 equilateral_jacobian_det(const Q3& m) {
  Q3 f = Q3(-249) * m + Q3(81, 64);
  Q3 p = m + Q3(3), p5 = p * p * p * p * p;
  return Q3(mpq_class(-64, 20667)) * Q3(-133, 60) * f * f * m * m * p5;
}

double inertia(const std::array<double, 6>& r, const std::array<double, 4>& m) {
  double M = m[0] + m[1] + m[2] + m[3], s = 0;
  for (int k = 0; k < 6; ++k) s += m[kPairs[k][0]] * m[kPairs[k][1]] * r[k] * r[k];
  return s / M;
}

double potential(const std::array<double, 6>& r, const std::array<double, 4>& m) {
  double s = 0;
  for (int k = 0; k < 6; ++k) s += m[kPairs[k][0]] * m[kPairs[k][1]] / r[k];
  return s;
}

std::array<double, 6> to_ac_scale(const std::array<double, 6>& r, const std::array<double, 4>& m) {
  double M = m[0] + m[1] + m[2] + m[3];
  double s = std::cbrt(potential(r, m) / (M * inertia(r, m)));
  std::array<double, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = s * r[k];
  return out;
}

std::array<double, 8> to_dziobek(const std::array<double, 6>& r, const std::array<double, 4>& m) {
  double s = 1.0 / std::sqrt(inertia(r, m));
  std::array<double, 6> q;
  for (int k = 0; k < 6; ++k) q[k] = s * r[k];
  double M = m[0] + m[1] + m[2] + m[3];
  // Rows: a·λ₀ + b·μ = c per pair; 2×2 normal equations.
  double aa = 0, ab = 0, bb = 0, ac = 0, bc = 0;
  for (int k = 0; k < 6; ++k) {
    double mm = m[kPairs[k][0]] * m[kPairs[k][1]];
    double a = 2 * mm * q[k] * q[k] * q[k];
    double b = M * q[k] * q[k] * cayley_menger_gradient()[k].evaluate(std::span<const double>(q));
    double c = M * mm;
    aa += a * a, ab += a * b, bb += b * b, ac += a * c, bc += b * c;
  }
  double d = aa * bb - ab * ab;
  std::array<double, 8> x{};
  if (d != 0) {
    x[0] = (ac * bb - ab * bc) / d;
    x[1] = (aa * bc - ab * ac) / d;
  } else if (aa != 0) {
    x[0] = ac / aa;
  }
  for (int k = 0; k < 6; ++k) x[2 + k] = q[k];
  return x;
}

std::array<double, 6> distances_of(const std::array<double, 8>& x) {
  return {x[2], x[3], x[4], x[5], x[6], x[7]};
}

double triangle_area_sq16(const std::array<double, 6>& r, int i, int j, int k) {
  double a = r[pair_index(i, j)], b = r[pair_index(i, k)], c = r[pair_index(j, k)];
  return (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
}

bool is_collinear(const std::array<double, 6>& r, double tol) {
  const int tri[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (auto& t : tri)
    if (std::abs(triangle_area_sq16(r, t[0], t[1], t[2])) >= tol) return false;
  return true;
}

}  // namespace ccbif
