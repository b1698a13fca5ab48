// One line per acceptance criterion; exit status 1 if any fails.

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "ccbif/bifurcation.h"
#include "ccbif/lyapunov_schmidt.h"
#include "ccbif/solver.h"
#include "util.h"

using namespace ccbif;
using testutil::iv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BifurcationCertificate certify(MassPattern family, const ref::Point& p) {
  PolySystem sys = build_dziobek(family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal());
  return sotomayor_classify(sys, locate_singularity(sys, testutil::ref_guess(p)));
}

// |enclosure − printed decimal| measured from the enclosure midpoint.
double distance_to(const Interval& x, const std::string& decimal) {
  Interval d = x - Interval::from_strings(decimal, decimal, x.precision());
  return std::max(std::abs(d.lo_d()), std::abs(d.hi_d()));
}

Outcome c1_fold3() {
  auto t0 = std::chrono::steady_clock::now();
  BifurcationCertificate c = certify(MassPattern::ThreeEqual, ref::fold3);
  double t = seconds_since(t0);
  Box reference = testutil::ref_box(ref::fold3);
  bool ok = c.classification == Classification::Fold && iv(ref::fold3.m).contains(c.m()) &&
            distance_to(c.m(), "1.00266054757261") < 1e-14 && t < 120;
  double worst = 0, width = c.m().width_d();
  int strict = 0;
  for (std::size_t i = 2; i < 8; ++i) {
    // Agreement with the printed r-values at the 1e-10 level, tight enclosures.
    double d = std::abs(c.x[i].mid_d() - reference[i].mid_d());
    worst = std::max(worst, d);
    width = std::max(width, c.x[i].width_d());
    strict += reference[i].contains(c.x[i]);
  }
  ok = ok && worst < 1e-10 && width < 1e-10;
  return {ok, fmt("%s, m in [%s, %s], max |r - r_ref| = %.1e, width %.1e, %d/6 r inside printed ?-intervals, %.2f s",
                  to_string(c.classification).c_str(), c.m().lo_str(28).c_str(), c.m().hi_str(28).c_str(), worst,
                  width, strict, t)};
}

Outcome c2_pitch3() {
  auto t0 = std::chrono::steady_clock::now();
  BifurcationCertificate c = certify(MassPattern::ThreeEqual, ref::pitch3);
  double t = seconds_since(t0);
  bool ok = c.classification == Classification::PitchforkSupercritical && iv(ref::pitch3.m).contains(c.m()) &&
            distance_to(c.m(), "0.99184227439094") < 1e-14 && iv(ref::pitch3_q2).contains(c.q.q2) &&
            iv(ref::pitch3_q4).contains(c.q.q4) && t < 120;
  return {ok, fmt("%s via %s (R=%s), m in [%s, %s], q2 = %s, q4 = %s, %.2f s", to_string(c.classification).c_str(),
                  to_string(c.route).c_str(), c.restriction.c_str(), c.m().lo_str(25).c_str(),
                  c.m().hi_str(25).c_str(), c.q.q2.str(12).c_str(), c.q.q4.str(12).c_str(), t)};
}

Outcome c3_fold2() {
  auto t0 = std::chrono::steady_clock::now();
  BifurcationCertificate c = certify(MassPattern::TwoPairs, ref::fold2);
  double t = seconds_since(t0);
  bool ok = c.classification == Classification::Fold && iv(ref::fold2.m).contains(c.m()) &&
            distance_to(c.m(), "0.997294013195487928") < 1e-17 && iv(ref::fold2_q1).contains(c.q.q1) &&
            iv(ref::fold2_q3).contains(c.q.q3);
  return {ok, fmt("%s, m in [%s, %s], q1 = %s, q3 = %s, %.2f s", to_string(c.classification).c_str(),
                  c.m().lo_str(25).c_str(), c.m().hi_str(25).c_str(), c.q.q1.str(18).c_str(),
                  c.q.q3.str(18).c_str(), t)};
}

Outcome c4_pitch2() {
  auto t0 = std::chrono::steady_clock::now();
  BifurcationCertificate c = certify(MassPattern::TwoPairs, ref::pitch2);
  double t = seconds_since(t0);
  bool ok = c.classification == Classification::PitchforkSupercritical && iv(ref::pitch2.m).contains(c.m()) &&
            distance_to(c.m(), "0.9922994477523853") < 1e-15 && iv(ref::pitch2_q2).contains(c.q.q2) &&
            iv(ref::pitch2_q4).contains(c.q.q4);
  return {ok, fmt("%s via %s (R=%s), m in [%s, %s], q2 = %s, q4 = %s, %.2f s", to_string(c.classification).c_str(),
                  to_string(c.route).c_str(), c.restriction.c_str(), c.m().lo_str(25).c_str(),
                  c.m().hi_str(25).c_str(), c.q.q2.str(20).c_str(), c.q.q4.str(20).c_str(), t)};
}

Outcome c5_equilateral_det() {
  bool exact_zero = equilateral_jacobian_det(equilateral_degenerate_mass()).is_zero();
  PolySystem sys = build_dziobek(MassParams::three_equal());
  CompiledSystemT<long double> f(sys);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.05, 10);
  double worst = 0;
  int converged = 0;
  for (int k = 0; k < 20; ++k) {
    double m = u(rng);
    auto d = to_dziobek(equilateral_point(m), MassParams::three_equal().at(m));
    NewtonResult nr = newton(CompiledSystem(sys), std::vector<double>(d.begin(), d.end()), m);
    if (!nr.converged) continue;
    ++converged;
    std::vector<long double> x(nr.x.begin(), nr.x.end()), fv(8), jac(64);
    f.eval_jacobian(x.data(), (long double)m, fv.data(), jac.data());
    Eigen::Matrix<long double, 8, 8> a;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) a(i, j) = jac[i * 8 + j];
    double closed = equilateral_jacobian_det(m);
    worst = std::max(worst, std::abs((double)a.fullPivLu().determinant() - closed) / std::abs(closed));
  }
  bool ok = exact_zero && converged == 20 && worst < 1e-8;
  return {ok, fmt("exact zero at (81+64*sqrt3)/249: %s; max relative error over %d masses %.2e", exact_zero ? "yes" : "no",
                  converged, worst)};
}

Outcome c6_lyapunov_schmidt() {
  auto t0 = std::chrono::steady_clock::now();
  LSExpansion ls = ls_reduce(2);
  double t = seconds_since(t0);
  bool p1 = ls.p1 == mpq_class("529935346928");
  bool p3 = std::abs(ls.p3 - -32.46926929) < 1e-6;
  // Solutions (0,0), (−σ,−σ), (−σ,2σ), (2σ,−σ); the printed list uses the
  // symbol p₃ for σ, but its own factors vanish at σ = p₂/p₁ = 1/p₃.
  KElem z(ls.field), s = ls.s, two(ls.field, 2);
  std::vector<std::array<KElem, 2>> pattern{{z, z}, {-s, -s}, {-s, two * s}, {two * s, -s}};
  int matched = 0;
  for (const auto& e : pattern)
    for (const auto& sol : ls.solutions)
      if (sol[0] == e[0] && sol[1] == e[1]) {
        auto r = ls.residual(sol[0], sol[1]);
        matched += r[0].is_zero() && r[1].is_zero();
      }
  bool ok = p1 && p3 && matched == 4 && ls.solutions.size() == 4 && t < 300;
  std::ostringstream os;
  os.precision(13);
  os << "p1 = " << ls.p1.get_str() << ", p3 = " << ls.p3 << ", " << matched
     << "/4 solutions of the pattern with sigma = p2/p1, residuals exactly 0, " << fmt("%.2f s", t);
  return {ok, os.str()};
}

// Enumerations shared by criteria 7 and 8.
struct RowData {
  MassPattern family;
  double m;
  Enumeration dz, ac;
};

std::vector<RowData>& rows() {
  static std::vector<RowData> data;
  return data;
}

Outcome c7_counts() {
  auto t0 = std::chrono::steady_clock::now();
  EnumerateOptions opt;
  opt.budget = 100000;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  struct Expect {
    MassPattern family;
    double m;
    std::size_t dz, ac, distinct;
  };
  std::vector<Expect> expect{{MassPattern::ThreeEqual, 0.5, 13, 26, 25}, {MassPattern::ThreeEqual, 0.9, 13, 26, 25},
                             {MassPattern::ThreeEqual, 1.0, 19, 32, 31}, {MassPattern::ThreeEqual, 2.0, 13, 26, 25},
                             {MassPattern::TwoPairs, 0.5, 11, 24, 23},   {MassPattern::TwoPairs, 0.994, 15, 28, 27},
                             {MassPattern::TwoPairs, 1.0, 19, 32, 31}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& e : expect) {
    MassParams mp = e.family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal();
    RowData r{e.family, e.m, multistart_enumerate(build_dziobek(mp), e.m, opt),
              multistart_enumerate(build_ac(mp), e.m, opt)};
    std::size_t dz = r.dz.solutions.size(), ac = r.ac.solutions.size(), distinct = ac - 1;
    bool row_ok = dz == e.dz && ac == e.ac && distinct == e.distinct;
    ok = ok && row_ok;
    os << (e.family == MassPattern::TwoPairs ? "2p" : "3e") << " m=" << e.m << ":(" << dz << "," << ac << ","
       << distinct << ")" << (row_ok ? "" : "!") << " ";
    rows().push_back(std::move(r));
  }
  double t = seconds_since(t0);
  ok = ok && t < 600;
  os << fmt("budget 1e5, seed 20240601, %.1f s", t);
  return {ok, os.str()};
}

Polynomial random_polynomial(std::mt19937_64& rng, std::size_t arity) {
  std::uniform_int_distribution<int> nterms(1, 6), var(0, int(arity) - 1), ex(1, 4), coef(-20, 20), den(1, 7);
  Polynomial p(arity);
  for (int t = nterms(rng); t > 0; --t) {
    std::map<std::uint16_t, std::uint16_t> f;
    for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i) f[var(rng)] += ex(rng);
    p.add_term(Monomial(std::vector<Monomial::Factor>(f.begin(), f.end())), mpq_class(coef(rng), den(rng)));
  }
  return p;
}

Outcome c8_properties() {
  std::vector<std::string> failed;

  // Cayley tables.
  for (const Group* g : {&Group::d6(), &Group::klein4()})
    for (std::size_t a = 0; a < g->order(); ++a)
      for (std::size_t b = 0; b < g->order(); ++b)
        if (g->compose(g->elements()[a].label, g->elements()[b].label) != g->table()[a][b]) failed.push_back("cayley");

  // Symbolic equivariance.
  std::vector<std::pair<PolySystem, const Group*>> eq{{build_dziobek(MassParams::three_equal()), &Group::d6()},
                                                      {build_ac(MassParams::three_equal()), &Group::d6()},
                                                      {build_dziobek(MassParams::two_pairs()), &Group::klein4()},
                                                      {build_ac(MassParams::two_pairs()), &Group::klein4()}};
  for (const auto& [sys, g] : eq)
    if (!check_equivariance(sys, *g).equivariant) failed.push_back("equivariance");

  // Gradients against central differences at 100 random points.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 2);
  double fd_worst = 0;
  for (const auto& [sys, g] : eq) {
    std::vector<std::vector<Polynomial>> grad(sys.equations.size());
    for (std::size_t i = 0; i < sys.equations.size(); ++i)
      for (std::size_t l = 0; l < sys.arity(); ++l) grad[i].push_back(sys.equations[i].derivative(l));
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x(sys.arity());
      for (auto& v : x) v = u(rng);
      std::vector<long double> xl(x.begin(), x.end());
      for (std::size_t i = 0; i < sys.equations.size(); ++i)
        for (std::size_t l = 0; l < sys.arity(); ++l) {
          const long double h = 1e-6L;
          auto xp = xl, xm = xl;
          xp[l] += h, xm[l] -= h;
          long double fd = (testutil::eval_ld(sys.equations[i], xp) - testutil::eval_ld(sys.equations[i], xm)) / (2 * h);
          double d = grad[i][l].evaluate(std::span<const double>(x));
          double scale = grad[i][l].is_zero() ? std::max(1.0, testutil::abs_eval(sys.equations[i], x))
                                              : testutil::abs_eval(grad[i][l], x);
          fd_worst = std::max(fd_worst, std::abs((double)fd - d) / scale);
        }
    }
  }
  if (!(fd_worst < 1e-6)) failed.push_back("derivatives");

  // Inclusion isotonicity.
  int iso_fail = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 1 + t % 4;
    Polynomial p = random_polynomial(rng, n);
    Box outer, inner;
    std::uniform_real_distribution<double> w(-3, 3), f(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
      double a = w(rng), b = w(rng);
      if (a > b) std::swap(a, b);
      double c = a + (b - a) * f(rng), d = a + (b - a) * f(rng);
      if (c > d) std::swap(c, d);
      outer.push_back(Interval::hull(a, b));
      inner.push_back(Interval::hull(c, d));
    }
    iso_fail += !interval_eval(p, outer).contains(interval_eval(p, inner));
  }
  if (iso_fail) failed.push_back("isotonicity");

  // Counts and orbit-stabilizer on the criterion-7 enumerations.
  std::size_t orbits = 0, solutions = 0;
  bool counts = !rows().empty();
  for (const auto& r : rows()) {
    counts = counts && r.ac.solutions.size() == r.dz.solutions.size() + 13 && r.ac.collinear() == 12;
    const Group& g = Group::for_pattern(r.family);
    for (const Enumeration* e : {&r.dz, &r.ac}) {
      std::vector<std::vector<double>> xs;
      for (const auto& s : e->solutions) xs.push_back(s.x);
      for (const auto& o : orbit_dedup(xs, g)) {
        ++orbits;
        if (o.size * o.isotropy.order() != g.order()) failed.push_back("orbit-stabilizer");
      }
      solutions += xs.size();
    }
  }
  if (!counts) failed.push_back("AC-Dziobek=13/collinear=12");

  std::string detail = fmt("FD max rel err %.1e, isotonicity failures %d/1000, %zu orbits over %zu solutions", fd_worst,
                           iso_fail, orbits, solutions);
  for (const auto& f : failed) detail += "; FAILED " + f;
  return {failed.empty(), detail};
}

Outcome c9_branch_switch() {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  BifurcationCertificate c = sotomayor_classify(sys, locate_singularity(sys, testutil::ref_guess(ref::pitch3)));
  auto up = branch_switch(sys, c, 1e-3);
  auto down = branch_switch(sys, c, -1e-3);
  const GroupElement& g3 = Group::d6().element("g3");
  int sym = 0, asym = 0;
  std::vector<std::vector<double>> pair;
  for (const auto& s : up) {
    if (s.isotropy.label == "{E,g3}") ++sym;
    if (s.isotropy.label == "trivial") ++asym, pair.push_back(s.x);
  }
  bool exchanged = false;
  if (pair.size() == 2) {
    auto gx = act(g3, pair[0]);
    double d = 0;
    for (std::size_t i = 0; i < gx.size(); ++i) d = std::max(d, std::abs(gx[i] - pair[1][i]));
    exchanged = d < 1e-8;
  }
  // The three branches persist as distinct solutions with constant isotropy further up.
  std::size_t continued = 0;
  for (const auto& s : up) {
    Branch b = continue_branch(sys, s.x, s.m, s.m + 4e-3);
    bool same = b.termination == Termination::RangeEnd;
    for (const auto& p : b.points) same = same && p.isotropy == b.points.front().isotropy;
    continued += same;
  }
  bool ok = up.size() == 3 && sym == 1 && asym == 2 && exchanged && down.size() == 1 &&
            down[0].isotropy.label == "{E,g3}" && continued == 3;
  return {ok, fmt("m**+1e-3: %zu branches (%d {E,g3}, %d trivial, exchanged by g3: %s, %zu continued); m**-1e-3: %zu (%s)",
                  up.size(), sym, asym, exchanged ? "yes" : "no", continued, down.size(),
                  down.empty() ? "-" : down[0].isotropy.label.c_str())};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fold certification, three-equal", c1_fold3},
      {"pitchfork certification, three-equal", c2_pitch3},
      {"fold certification, two-pairs", c3_fold2},
      {"pitchfork certification, two-pairs", c4_pitch2},
      {"equilateral determinant", c5_equilateral_det},
      {"Lyapunov-Schmidt reduction", c6_lyapunov_schmidt},
      {"count tables", c7_counts},
      {"property suites", c8_properties},
      {"branch switching at the pitchfork", c9_branch_switch}};
  int failures = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k << ". " << name << ": " << o.detail << std::endl;
  }
  return failures ? 1 : 0;
}
