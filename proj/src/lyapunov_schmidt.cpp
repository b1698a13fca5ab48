#include "ccbif/lyapunov_schmidt.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "ccbif/equations.h"
#include "ccbif/polynomial.h"

namespace ccbif {

namespace {

using KVec = std::vector<KElem>;
using KMat = std::vector<KVec>;

// Gaussian elimination over K; first non-zero pivot (all arithmetic is exact).
KVec solve(KMat a, KVec b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c].is_zero()) ++p;
    if (p == n) throw LSError("ls_reduce: the 4x4 block of the Jacobian is singular");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    KElem inv = a[c][c].inverse();
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      KElem f = a[r][c] * inv;
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  KVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Q3 value = content · primitive, content a positive rational and primitive
// with coprime integer coordinates.
mpq_class content(const Q3& x) {
  mpz_class l = lcm(x.a().get_den(), x.b().get_den());
  mpz_class A = x.a().get_num() * (l / x.a().get_den());
  mpz_class B = x.b().get_num() * (l / x.b().get_den());
  mpz_class g = gcd(A, B);
  if (g == 0) throw std::domain_error("content of zero");
  mpq_class c(g, l);
  c.canonicalize();
  return c;
}

Q3 primitive(const Q3& x) { return x / Q3(content(x)); }

// n = k³·f with f cube-free (n > 0).
void cube_split(mpz_class n, mpz_class& k, mpz_class& f) {
  k = 1;
  f = 1;
  for (mpz_class p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 3; ++i) k *= p;
    for (int i = 0; i < e % 3; ++i) f *= p;
  }
  f *= n;
}

KElem dot(const KVec& a, const KVec& b) {
  KElem s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::array<KElem, 2> LSExpansion::residual(const KElem& b5, const KElem& b6) const {
  std::array<KElem, 5> mono{b5 * b5, b5 * b6, b6 * b6, b5, b6};
  std::array<KElem, 2> r;
  for (int row = 0; row < 2; ++row)
    for (int k = 0; k < 5; ++k) r[row] += g[row][k] * mono[k];
  return r;
}

LSExpansion ls_reduce(int order) {
  if (order != 2) throw std::invalid_argument("ls_reduce: only order 2 is implemented");
  LSExpansion L;
  L.order = order;
  L.m_star = equilateral_degenerate_mass();
  L.t = equilateral_alpha_cubed(L.m_star);
  L.field = std::make_shared<const CubicField>(L.t);
  const auto& K = L.field;
  auto scalar = [&](const Q3& q) { return KElem(K, q); };
  const KElem al = KElem::alpha(K);
  const KElem third_s3 = scalar(Q3(0, mpq_class(1, 3)));
  L.base = {al, al, al * third_s3, al, al * third_s3, al * third_s3};

  PolySystem sys = build_ac(MassParams::three_equal());
  const std::size_t n = 6, M = 6;  // M: index of m
  std::vector<KElem> pt(L.base.begin(), L.base.end());
  pt.push_back(scalar(L.m_star));
  unsigned deg = 0;
  for (const auto& e : sys.equations)
    for (std::size_t v = 0; v <= n; ++v) deg = std::max(deg, e.degree_in(v));
  PowerTable<KElem> pw(std::span<const KElem>(pt), deg);
  auto conv = [&](const mpq_class& q) { return scalar(Q3(q)); };
  auto ev = [&](const Polynomial& p) { return p.evaluate(pw, conv); };

  for (const auto& e : sys.equations)
    if (!ev(e).is_zero()) throw LSError("ls_reduce: base point is not an exact solution");

  KMat L0(n, KVec(n)), Fzm(n, KVec(n));
  std::vector<KMat> H(n, KMat(n, KVec(n)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Polynomial dj = sys.equations[i].derivative(j);
      L0[i][j] = ev(dj);
      Fzm[i][j] = ev(dj.derivative(M));
      for (std::size_t k = j; k < n; ++k) H[i][j][k] = H[i][k][j] = ev(dj.derivative(k));
    }

  KMat L11(4, KVec(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) L11[i][j] = L0[i][j];
  auto kernel_dir = [&](std::size_t col) {
    KVec rhs(4);
    for (std::size_t i = 0; i < 4; ++i) rhs[i] = -L0[i][col];
    KVec x = solve(L11, rhs);
    x.push_back(scalar(col == 4 ? 1 : 0));
    x.push_back(scalar(col == 5 ? 1 : 0));
    return x;
  };
  KVec beta5 = kernel_dir(4), beta6 = kernel_dir(5);
  for (std::size_t k = 0; k < 4; ++k) {
    L.rel_b5[k] = beta5[k];
    L.rel_b6[k] = beta6[k];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!dot(L0[i], beta5).is_zero() || !dot(L0[i], beta6).is_zero())
      throw LSError("ls_reduce: kernel is not two-dimensional at the base point");

  // a'(m_*) = α'·(1, 1, √3/3, 1, √3/3, √3/3) with α' = α·t'/(3t).
  const Q3 ms3 = L.m_star + Q3(3);
  const Q3 tp = Q3(-3, 9) / (ms3 * ms3);
  const KElem alp = al * scalar(tp / (Q3(3) * L.t));
  const KVec ap{alp, alp, alp * third_s3, alp, alp * third_s3, alp * third_s3};

  auto bil = [&](const KMat& h, const KVec& u, const KVec& v) {
    KElem s;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) s += h[j][k] * u[j] * v[k];
    return s;
  };
  // Order-ε² terms: H(a', b) + F_zm·b + ½H(b, b), as coefficients of
  // (b5², b5 b6, b6², b5, b6).
  const KElem half = scalar(Q3(mpq_class(1, 2)));
  KMat out(n, KVec(5));
  for (std::size_t i = 0; i < n; ++i) {
    out[i][0] = half * bil(H[i], beta5, beta5);
    out[i][1] = bil(H[i], beta5, beta6);
    out[i][2] = half * bil(H[i], beta6, beta6);
    out[i][3] = bil(H[i], ap, beta5) + dot(Fzm[i], beta5);
    out[i][4] = bil(H[i], ap, beta6) + dot(Fzm[i], beta6);
  }
  // Eliminate the v-components: G = Q-rows − L21·L11⁻¹·(Id−Q)-rows.
  for (std::size_t comp = 0; comp < 5; ++comp) {
    KVec rhs(4);
    for (std::size_t i = 0; i < 4; ++i) rhs[i] = out[i][comp];
    KVec y = solve(L11, rhs);
    for (std::size_t r = 0; r < 2; ++r) {
      KElem s = out[4 + r][comp];
      for (std::size_t j = 0; j < 4; ++j) s -= L0[4 + r][j] * y[j];
      L.g[r][comp] = s;
    }
  }

  L.C = L.g[0][2];
  L.E = L.g[0][4];
  const KElem two = scalar(2);
  const auto& g0 = L.g[0];
  const auto& g1 = L.g[1];
  bool factored = g0[0].is_zero() && g0[1] == two * L.C && g0[3] == two * L.E && g1[0] == L.C &&
                  g1[1] == two * L.C && g1[2].is_zero() && g1[3] == L.E && g1[4] == two * L.E;
  if (!factored) throw LSError("ls_reduce: bifurcation equations do not factor as expected");
  if (!L.C.coeff(0).is_zero() || !L.C.coeff(2).is_zero() || !L.E.coeff(0).is_zero() || !L.E.coeff(1).is_zero())
    throw LSError("ls_reduce: unexpected alpha-degree of the bifurcation coefficients");
  const Q3 c = L.C.coeff(1), e = L.E.coeff(2);

  // Radical form of α: t = r·P_n/P_d with P_n, P_d primitive.
  const Q3 num = Q3::sqrt3() * L.m_star + Q3(1), den = L.m_star + Q3(3);
  L.p_n = primitive(num);
  L.p_d = primitive(den);
  mpq_class r = 3 * content(num) / content(den);
  if (!(Q3(r) * L.p_n / L.p_d == L.t)) throw std::logic_error("ls_reduce: radical form of t");
  mpz_class kk, ff;
  cube_split(r.get_num() * r.get_den() * r.get_den(), kk, ff);
  L.k = mpq_class(kk, r.get_den());
  L.k.canonicalize();
  L.f = ff;
  L.beta_cubed = Q3(mpq_class(ff)) * L.p_n * L.p_d * L.p_d;

  // C/E = c/(e·α) = w/β.
  const Q3 w = c * L.p_d / (e * Q3(L.k));
  Q3 q = primitive(w.conj());
  Q3 p1 = w * q;
  if (!p1.is_rational()) throw std::logic_error("ls_reduce: p1 not rational");
  if (p1.a() < 0) {
    q = -q;
    p1 = -p1;
  }
  L.p1 = p1.a();
  L.p2_over_beta = q;
  L.p2 = std::cbrt(L.beta_cubed.to_double()) * q.to_double();
  L.p3 = L.p1.get_d() / L.p2;

  L.s = L.E / L.C;
  const KElem zero = scalar(0), s = L.s;
  L.solutions = {{zero, zero}, {-s, -s}, {-s, two * s}, {two * s, -s}};
  for (const auto& [b5, b6] : L.solutions) {
    KVec b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = b5 * beta5[k] + b6 * beta6[k];
    KVec rhs(4);
    for (std::size_t i = 0; i < 4; ++i) rhs[i] = -(bil(H[i], ap, b) + dot(Fzm[i], b) + half * bil(H[i], b, b));
    KVec cv = solve(L11, rhs);
    L.c.push_back({cv[0], cv[1], cv[2], cv[3]});
  }
  return L;
}

std::string LSExpansion::report() const {
  std::ostringstream os;
  os << "m_* = " << m_star.str() << "\n";
  os << "alpha^3 = " << t.str() << "\n";
  os << "alpha = (" << k.get_str() << ") * beta / (" << p_d.str() << "),  beta^3 = " << f.get_str() << " * ("
     << p_n.str() << ") * (" << p_d.str() << ")^2\n";
  const char* names[4] = {"b1", "b2", "b3", "b4"};
  for (int i = 0; i < 4; ++i)
    os << names[i] << " = (" << rel_b5[i].str() << ") b5 + (" << rel_b6[i].str() << ") b6\n";
  os << "G1 = (b6 + 2 b5)(p1 b6 + p2),  G2 = (b5 + 2 b6)(p1 b5 + p2)  [up to a common factor]\n";
  os << "p1 = " << p1.get_str() << "\n";
  os << "p2 = beta * (" << p2_over_beta.str() << ") ~ " << std::setprecision(15) << p2 << "\n";
  os << "p3 = p1/p2 ~ " << std::setprecision(15) << p3 << "\n";
  os << "s = p2/p1 = " << s.str() << " ~ " << s.to_double() << "\n";
  os << "order-2 solutions (b5, b6): (0, 0), (-s, -s), (-s, 2s), (2s, -s)\n";
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    auto res = residual(solutions[i][0], solutions[i][1]);
    os << "  (" << solutions[i][0].to_double() << ", " << solutions[i][1].to_double() << ")  G = ("
       << res[0].str() << ", " << res[1].str() << ")\n";
  }
  return os.str();
}

}  // namespace ccbif
