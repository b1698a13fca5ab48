#include <random>

#include "ccbif/solver.h"
#include "doctest.h"
#include "util.h"

using namespace ccbif;

namespace {

std::vector<double> equilateral_dziobek(double m) {
  auto d = to_dziobek(equilateral_point(m), MassParams::three_equal().at(m));
  return {d.begin(), d.end()};
}

double dist_inf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<Branch> continue_all(const PolySystem& sys, double m1) {
  std::vector<Branch> out;
  for (const auto& s : load_seeds(testutil::repo_data("seeds_equal_mass.json")))
    out.push_back(continue_branch(sys, s, 1.0, m1));
  return out;
}

}  // namespace

TEST_CASE("newton on known solutions") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  CompiledSystem f(sys);
  NewtonResult eq = newton(f, equilateral_dziobek(1.0), 1.0);
  REQUIRE(eq.converged);
  CHECK(eq.residual < 1e-12);

  auto guess = testutil::ref_guess(ref::fold3);
  double m = guess.back();
  guess.pop_back();
  NewtonResult fold = newton(f, guess, m);
  REQUIRE(fold.converged);
  CHECK(dist_inf(fold.x, guess) < 1e-10);

  NewtonResult far = newton(f, {0, 0, 100, 100, 100, 100, 100, 100}, 1.0);
  CHECK_FALSE(far.converged);
  CHECK_FALSE(far.reason.empty());

  // A regular solution converges quadratically.
  auto seeds = load_seeds(testutil::repo_data("seeds_equal_mass.json"));
  auto x0 = seeds[3];
  for (auto& v : x0) v *= 1 + 1e-4;
  NewtonResult nr = newton(f, x0, 1.0);
  REQUIRE(nr.converged);
  CHECK(nr.iterations <= 8);
  CHECK(dist_inf(nr.x, seeds[3]) < 1e-10);
}

TEST_CASE("multistart with a small budget") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  EnumerateOptions opt;
  opt.budget = 3000;
  Enumeration e = multistart_enumerate(sys, 1.0, opt);
  CHECK(e.starts == 3000);
  REQUIRE_FALSE(e.solutions.empty());
  CompiledSystem f(sys);
  for (const auto& s : e.solutions) {
    CHECK(s.residual < 1e-10);
    auto r = s.distances();
    for (double v : r) CHECK(v > 0);
    CHECK(std::abs(cayley_menger(r)) < 1e-9);
    CHECK_FALSE(s.collinear);
    // Closure: every image is again in the list.
    for (const auto& g : Group::d6().elements()) {
      auto gx = act(g, s.x);
      bool found = false;
      for (const auto& t : e.solutions) found = found || dist_inf(gx, t.x) < 1e-6;
      CHECK(found);
    }
  }
  for (std::size_t i = 1; i < e.solutions.size(); ++i) CHECK(dist_inf(e.solutions[i - 1].x, e.solutions[i].x) > 1e-6);

  // Deterministic, independent of the thread count.
  opt.threads = 3;
  Enumeration e3 = multistart_enumerate(sys, 1.0, opt);
  REQUIRE(e3.solutions.size() == e.solutions.size());
  for (std::size_t i = 0; i < e.solutions.size(); ++i) CHECK(e3.solutions[i].x == e.solutions[i].x);
}

TEST_CASE("AC enumeration finds the collinear configurations") {
  PolySystem sys = build_ac(MassParams::three_equal());
  EnumerateOptions opt;
  opt.budget = 4000;
  Enumeration e = multistart_enumerate(sys, 1.0, opt);
  CHECK(e.collinear() <= 12);
  CHECK(e.collinear() > 0);
  for (const auto& s : e.solutions) {
    CHECK(s.collinear == is_collinear(s.distances()));
    CHECK(s.x.size() == 6);
  }
}

TEST_CASE("solution record JSON round trip") {
  SolutionRecord r;
  r.x = load_seeds(testutil::repo_data("seeds_equal_mass.json")).front();
  r.m = 1;
  r.residual = 1e-15;
  r.isotropy = isotropy(r.x, Group::d6(), 1e-9);
  r.certificate_id = "kz-0123456789ab";
  SolutionRecord b = SolutionRecord::from_json(nlohmann::json::parse(r.to_json().dump()));
  CHECK(b.x == r.x);
  CHECK(b.isotropy.label == r.isotropy.label);
  CHECK(b.certificate_id == r.certificate_id);
}

TEST_CASE("branch CSV round trip") {
  Branch b;
  b.family = MassPattern::TwoPairs;
  b.termination = Termination::FoldDetected;
  b.points.push_back({0.99, {4.1, 0.79, 1, 0.5, 1, 0.5, 1, 0.5}, -1.25e-3, 1e-14, "{E,h1}"});
  b.points.push_back({0.995, {4.2, 0.78, 1.1, 0.5, 1, 0.5, 1, 0.5}, 3e-4, 2e-14, "trivial"});
  Branch c = Branch::from_csv(b.to_csv());
  CHECK(c.family == b.family);
  CHECK(c.termination == b.termination);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].isotropy == "{E,h1}");
  CHECK(c.points[1].x == b.points[1].x);
  CHECK(c.points[0].det == b.points[0].det);
  CHECK(c.to_csv() == b.to_csv());
  CHECK_THROWS(Branch::from_csv("garbage"));
}

TEST_CASE("continuation of the equal-mass solutions through the three-equal folds") {
  auto branches = continue_all(build_dziobek(MassParams::three_equal()), 1.01);
  int folds = 0;
  for (const auto& b : branches) {
    REQUIRE_FALSE(b.points.empty());
    if (b.termination != Termination::FoldDetected) {
      CHECK(b.termination == Termination::RangeEnd);
      CHECK(b.points.back().m == doctest::Approx(1.01));
      continue;
    }
    ++folds;
    CHECK(std::abs(b.points.back().m - 1.00266054757261) < 1e-6);
    // Isotropy is constant along the branch.
    for (const auto& p : b.points) CHECK(p.isotropy == b.points.front().isotropy);
  }
  CHECK(folds == 6);
}

TEST_CASE("continuation of the equal-mass solutions in the two-pairs family") {
  auto branches = continue_all(build_dziobek(MassParams::two_pairs()), 0.99);
  int fold = 0, pitch = 0;
  for (const auto& b : branches) {
    if (b.termination != Termination::FoldDetected) continue;
    double m = b.points.back().m;
    if (std::abs(m - 0.997294013195488) < 1e-6) ++fold;
    if (std::abs(m - 0.992299447752385) < 1e-6) ++pitch;
  }
  CHECK(fold == 4);
  CHECK(pitch == 4);
}

TEST_CASE("the equilateral family persists through m_*") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  Branch b = continue_branch(sys, equilateral_dziobek(1.0), 1.0, 0.5);
  CHECK(b.termination == Termination::RangeEnd);
  CHECK(b.points.back().m == doctest::Approx(0.5));
  double ms = equilateral_degenerate_mass().to_double();
  bool left = false, right = false;
  for (const auto& p : b.points) {
    CHECK(p.isotropy == "D6");
    left = left || p.m < ms;
    right = right || p.m > ms;
  }
  CHECK(left);
  CHECK(right);
  CHECK_THROWS(continue_branch(sys, {0, 0, 100, 100, 100, 100, 100, 100}, 1.0, 1.1));
}

TEST_CASE("certify_solution on every stored seed") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  auto seeds = load_seeds(testutil::repo_data("seeds_equal_mass.json"));
  for (const auto& s : seeds) {
    KrawczykCertificate c = certify_solution(sys, 1, s);
    CHECK(c.verdict == Verdict::UniqueZero);
    auto mid = mid_d(c.enclosure);
    CHECK(dist_inf(mid, s) < 1e-10);
  }
}
