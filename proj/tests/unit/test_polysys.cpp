#include <Eigen/Dense>

#include <fstream>
#include <numeric>
#include <random>

#include "ccbif/augmented.h"
#include "ccbif/equations.h"
#include "ccbif/solver.h"
#include "ccbif/symmetry.h"
#include "doctest.h"
#include "util.h"

using namespace ccbif;
using testutil::abs_eval;

namespace {

std::array<mpq_class, 6> qr(std::initializer_list<int> v) {
  std::array<mpq_class, 6> r;
  std::size_t i = 0;
  for (int x : v) r[i++] = x;
  return r;
}

mpq_class random_rational(std::mt19937_64& rng, int lo_num, int hi_num, int den) {
  std::uniform_int_distribution<int> d(lo_num, hi_num);
  return mpq_class(d(rng), den);
}

// Random Dziobek-shaped point: λ₀ ∈ [1,5], μ ∈ [0.1,1], r ∈ [0.5,2], m ∈ [0.5,2].
std::vector<double> random_point(std::mt19937_64& rng, std::size_t arity) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(arity);
  for (std::size_t i = 0; i < arity; ++i) x[i] = 0.5 + 1.5 * u(rng);
  if (arity == 9) x[0] = 1 + 4 * u(rng), x[1] = 0.1 + 0.9 * u(rng);
  return x;
}

std::vector<PolySystem> all_systems() {
  return {build_dziobek(MassParams::three_equal()), build_dziobek(MassParams::two_pairs()),
          build_ac(MassParams::three_equal()), build_ac(MassParams::two_pairs()),
          build_dziobek(MassParams::general({1, 2, 3, 4}))};
}

double ac_rel_residual(const PolySystem& ac, const std::array<double, 6>& r, double m) {
  std::vector<double> x(r.begin(), r.end());
  x.push_back(m);
  double worst = 0;
  for (const auto& e : ac.equations) worst = std::max(worst, std::abs(e.evaluate(std::span<const double>(x))) / abs_eval(e, x));
  return worst;
}

// Dziobek Jacobian determinant at x (unknowns) via long-double LU.
long double dziobek_det(const PolySystem& sys, const std::vector<double>& x, double m) {
  CompiledSystemT<long double> f(sys);
  std::size_t n = f.unknowns();
  std::vector<long double> xl(x.begin(), x.end()), fv(n), jac(n * n);
  f.eval_jacobian(xl.data(), (long double)m, fv.data(), jac.data());
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = jac[i * n + j];
  return a.fullPivLu().determinant();
}

std::vector<double> equilateral_dziobek(double m) {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  auto d = to_dziobek(equilateral_point(m), MassParams::three_equal().at(m));
  NewtonResult nr = newton(CompiledSystem(sys), std::vector<double>(d.begin(), d.end()), m);
  REQUIRE(nr.converged);
  return nr.x;
}

}  // namespace

TEST_CASE("cayley-menger determinant values") {
  CHECK(cayley_menger(qr({1, 1, 1, 1, 1, 1})) == 4);
  for (int r : {2, 3, 7}) CHECK(cayley_menger(qr({r, r, r, r, r, r})) == 4 * mpq_class(r * r * r * r * r * r));
  // 3-4-5 rectangle: sides 3,4,3,4 with diagonals 5 on pairs 13 and 24.
  CHECK(cayley_menger(qr({3, 5, 4, 4, 5, 3})) == 0);
  CHECK(cayley_menger(std::array<double, 6>{1, 1, 1, 1, 1, 1}) == doctest::Approx(4));
}

TEST_CASE("cayley-menger is invariant under the D6 permutations") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<mpq_class, 6> r;
    for (auto& x : r) x = random_rational(rng, 1, 40, 7);
    mpq_class base = cayley_menger(r);
    for (const auto& g : Group::d6().elements()) {
      std::array<mpq_class, 6> y;
      for (int i = 0; i < 6; ++i) y[i] = r[g.perm[i]];
      CHECK(cayley_menger(y) == base);
    }
  }
}

TEST_CASE("dziobek system at equal masses") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  REQUIRE(sys.equations.size() == 8);
  REQUIRE(sys.variables.size() == 9);
  std::vector<mpq_class> x{2, 3, 1, 1, 1, 1, 1, 1, 1};
  CHECK(sys.equations[1].evaluate(std::span<const mpq_class>(x)) == 4);
  // F1 = M(I − 1) with M = 4 and I = 6/4.
  CHECK(sys.equations[0].evaluate(std::span<const mpq_class>(x)) / 4 == mpq_class(1, 2));
  CHECK_FALSE(sys.equations[0].depends_on(0));
  CHECK(sys.equations[0].derivative(0).is_zero());
}

TEST_CASE("dziobek residuals vanish on the reference fold box") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  Box b = testutil::ref_box(ref::fold3);
  for (const auto& e : sys.equations) CHECK(interval_eval(e, b).contains_zero());
  AugmentedSystem aug(sys);
  CHECK(aug.eval(b)[8].contains_zero());
}

TEST_CASE("general-mass AC equation matches the stored golden polynomial") {
  std::ifstream in(testutil::test_data("ac_f1_general.json"));
  REQUIRE(in);
  Polynomial golden = Polynomial::from_json(nlohmann::json::parse(in));
  REQUIRE(golden.arity() == 10);

  std::array<mpq_class, 4> masses{1, 2, 3, 5};
  Polynomial g = golden;
  for (int k = 0; k < 4; ++k) g = g.substituted(6 + k, masses[k]);
  std::vector<std::size_t> to7{0, 1, 2, 3, 4, 5, 6, 6, 6, 6};
  CHECK(g.renamed(to7, 7) == build_ac(MassParams::general(masses)).equations[0]);

  // (1,1,1,m): the fourth mass becomes the system parameter.
  Polynomial h = golden.substituted(6, 1).substituted(7, 1).substituted(8, 1);
  std::vector<std::size_t> rename{0, 1, 2, 3, 4, 5, 6, 6, 6, 6};
  CHECK(h.renamed(rename, 7) == build_ac(MassParams::three_equal()).equations[0]);
}

TEST_CASE("equilateral family solves the AC system") {
  PolySystem ac = build_ac(MassParams::three_equal());
  CHECK(ac_rel_residual(ac, equilateral_point(1.0), 1.0) < 1e-13);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-3, 10);
  for (int i = 0; i < 20; ++i) {
    double m = u(rng);
    CHECK(ac_rel_residual(ac, equilateral_point(m), m) < 1e-12);
  }
  // α = (3(√3m + 3)/(m + 3))^(1/3), the other reading of the family, does not.
  double a = std::cbrt(3 * (std::sqrt(3.0) + 3) / 4), b = a / std::sqrt(3.0);
  CHECK(ac_rel_residual(ac, {a, a, b, a, b, b}, 1.0) > 1e-3);
  CHECK_THROWS_AS(equilateral_point(0), std::domain_error);
  CHECK_THROWS_AS(equilateral_point(-1), std::domain_error);
}

TEST_CASE("equilateral determinant closed form") {
  Q3 ms = equilateral_degenerate_mass();
  CHECK(ms == Q3(mpq_class(81, 249), mpq_class(64, 249)));
  CHECK(equilateral_jacobian_det(ms).is_zero());
  CHECK_FALSE(equilateral_jacobian_det(Q3(1)).is_zero());
  CHECK(equilateral_jacobian_det(Q3(1)).to_double() == doctest::Approx(equilateral_jacobian_det(1.0)).epsilon(1e-14));
  CHECK(std::abs(equilateral_jacobian_det(1e-6)) < 1e-6);

  PolySystem sys = build_dziobek(MassParams::three_equal());
  for (double m : {1.0, 0.3, 2.5}) {
    long double d = dziobek_det(sys, equilateral_dziobek(m), m);
    CHECK(std::abs((double)d - equilateral_jacobian_det(m)) / std::abs(equilateral_jacobian_det(m)) < 1e-8);
  }
}

TEST_CASE("the AC Jacobian loses rank two on the equilateral family at m_*") {
  PolySystem ac = build_ac(MassParams::three_equal());
  double ms = equilateral_degenerate_mass().to_double();
  auto r = equilateral_point(ms);
  CompiledSystemT<long double> f(ac);
  std::vector<long double> x(r.begin(), r.end()), fv(6), jac(36);
  f.eval_jacobian(x.data(), (long double)ms, fv.data(), jac.data());
  Eigen::Matrix<long double, 6, 6> a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = jac[i * 6 + j];
  Eigen::JacobiSVD<Eigen::Matrix<long double, 6, 6>> svd(a);
  auto s = svd.singularValues();
  CHECK(s(4) / s(0) < 1e-12);
  CHECK(s(3) / s(0) > 1e-4);
  CHECK(std::abs(a.topLeftCorner<4, 4>().determinant()) > 1e-6 * std::pow(s(0), 4));
}

TEST_CASE("rational and floating evaluation agree") {
  std::mt19937_64 rng(11);
  for (const auto& sys : all_systems())
    for (int t = 0; t < 20; ++t) {
      std::vector<mpq_class> xq(sys.arity());
      std::vector<double> xd(sys.arity());
      for (std::size_t i = 0; i < xq.size(); ++i) xq[i] = random_rational(rng, 10, 1000, 100), xd[i] = xq[i].get_d();
      for (const auto& e : sys.equations) {
        double exact = mpq_class(e.evaluate(std::span<const mpq_class>(xq))).get_d();
        double approx = e.evaluate(std::span<const double>(xd));
        CHECK(std::abs(exact - approx) <= 1e-12 * abs_eval(e, xd));
      }
    }
}

TEST_CASE("symbolic gradients agree with central differences") {
  std::mt19937_64 rng(3);
  const double h = 1e-6;
  double worst = 0;
  for (const auto& sys : all_systems()) {
    std::vector<std::vector<Polynomial>> grad(sys.equations.size());
    for (std::size_t i = 0; i < sys.equations.size(); ++i)
      for (std::size_t l = 0; l < sys.arity(); ++l) grad[i].push_back(sys.equations[i].derivative(l));
    for (int t = 0; t < 100; ++t) {
      auto x = random_point(rng, sys.arity());
      std::vector<long double> xl(x.begin(), x.end());
      for (std::size_t i = 0; i < sys.equations.size(); ++i)
        for (std::size_t l = 0; l < sys.arity(); ++l) {
          auto xp = xl, xm = xl;
          xp[l] += h, xm[l] -= h;
          long double fd = (testutil::eval_ld(sys.equations[i], xp) - testutil::eval_ld(sys.equations[i], xm)) / (2 * h);
          double d = grad[i][l].evaluate(std::span<const double>(x));
          double scale = std::max(abs_eval(grad[i][l], x), 1e-300);
          if (grad[i][l].is_zero()) scale = std::max(1.0, abs_eval(sys.equations[i], x));
          worst = std::max(worst, std::abs((double)fd - d) / scale);
        }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("second directional derivatives agree with central differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const long double h = 1e-4L;
  double worst = 0;
  for (const auto& sys : all_systems()) {
    std::size_t k = sys.arity();
    for (int t = 0; t < 100; ++t) {
      auto x = random_point(rng, k);
      std::vector<double> v(k);
      for (auto& c : v) c = n01(rng);
      std::vector<long double> xl(x.begin(), x.end()), xp = xl, xm = xl;
      for (std::size_t l = 0; l < k; ++l) xp[l] += h * v[l], xm[l] -= h * v[l];
      std::size_t i = t % sys.equations.size();
      const Polynomial& e = sys.equations[i];
      long double fd = (testutil::eval_ld(e, xp) - 2 * testutil::eval_ld(e, xl) + testutil::eval_ld(e, xm)) / (h * h);
      double d2 = 0, scale = 1e-300;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
          Polynomial dd = e.derivative(a).derivative(b);
          d2 += dd.evaluate(std::span<const double>(x)) * v[a] * v[b];
          scale += abs_eval(dd, x) * std::abs(v[a] * v[b]);
        }
      worst = std::max(worst, std::abs((double)fd - d2) / scale);
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("differentiate by multi-index") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  std::vector<unsigned> idx(9, 0);
  idx[2] = 1;
  PolySystem d = differentiate(sys, idx);
  for (std::size_t i = 0; i < 8; ++i) CHECK(d.equations[i] == sys.equations[i].derivative(2));
  idx[2] = 2, idx[8] = 1;
  d = differentiate(sys, idx);
  CHECK(d.equations[2] == sys.equations[2].derivative(2).derivative(2).derivative(8));
  // ∂F2/∂r12 at all r = 1 by central differences of the Cayley-Menger determinant.
  std::vector<double> x{0, 0, 1, 1, 1, 1, 1, 1, 1};
  double exact = sys.equations[1].derivative(2).evaluate(std::span<const double>(x));
  const double h = 1e-5;
  std::array<double, 6> rp{1 + h, 1, 1, 1, 1, 1}, rm{1 - h, 1, 1, 1, 1, 1};
  double fd = (cayley_menger(rp) - cayley_menger(rm)) / (2 * h);
  CHECK(std::abs(fd - exact) / std::abs(exact) < 1e-8);
}

TEST_CASE("systems are equivariant exactly at rational points") {
  std::mt19937_64 rng(13);
  struct Case {
    PolySystem sys;
    const Group* g;
  };
  std::vector<Case> cases{{build_dziobek(MassParams::three_equal()), &Group::d6()},
                          {build_ac(MassParams::three_equal()), &Group::d6()},
                          {build_dziobek(MassParams::two_pairs()), &Group::klein4()},
                          {build_ac(MassParams::two_pairs()), &Group::klein4()}};
  for (auto& c : cases) {
    EquivarianceReport rep = check_equivariance(c.sys, *c.g);
    REQUIRE(rep.equivariant);
    for (int t = 0; t < 100; ++t) {
      std::vector<mpq_class> x(c.sys.arity());
      for (auto& q : x) q = random_rational(rng, 1, 300, 97);
      std::vector<mpq_class> fx;
      for (const auto& e : c.sys.equations) fx.push_back(e.evaluate(std::span<const mpq_class>(x)));
      for (const auto& [label, pi] : rep.equation_perms) {
        auto perm = c.g->element(label).permutation(c.sys.unknowns());
        perm.push_back(c.sys.parameter());
        std::vector<mpq_class> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[perm[i]];
        for (std::size_t i = 0; i < c.sys.equations.size(); ++i)
          CHECK(c.sys.equations[i].evaluate(std::span<const mpq_class>(y)) == fx[pi[i]]);
      }
    }
  }
}

TEST_CASE("equal-mass Dziobek seeds satisfy the AC system") {
  auto seeds = load_seeds(testutil::repo_data("seeds_equal_mass.json"));
  REQUIRE(seeds.size() == 19);
  PolySystem ac = build_ac(MassParams::three_equal());
  auto masses = MassParams::three_equal().at(1.0);
  for (const auto& s : seeds) {
    std::array<double, 6> r;
    std::copy(s.begin() + 2, s.begin() + 8, r.begin());
    CHECK(ac_rel_residual(ac, to_ac_scale(r, masses), 1.0) < 1e-9);
  }
}

TEST_CASE("canonical JSON round trip") {
  for (const auto& sys : all_systems()) {
    nlohmann::json j = sys.to_json();
    PolySystem back = PolySystem::from_json(j);
    CHECK(back.equations == sys.equations);
    CHECK(back.variables == sys.variables);
    CHECK(back.to_json().dump() == j.dump());
  }
}
