#include <random>
#include <set>

#include "ccbif/augmented.h"
#include "ccbif/solver.h"
#include "ccbif/symmetry.h"
#include "doctest.h"
#include "util.h"

using namespace ccbif;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.5, 2);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

double dist_inf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("composition reproduces the Cayley tables") {
  for (const Group* g : {&Group::d6(), &Group::klein4()}) {
    const auto& els = g->elements();
    REQUIRE(g->table().size() == els.size());
    std::set<std::string> labels;
    for (const auto& e : els) labels.insert(e.label);
    for (std::size_t a = 0; a < els.size(); ++a)
      for (std::size_t b = 0; b < els.size(); ++b) {
        std::string c = g->compose(els[a].label, els[b].label);
        CHECK(c == g->table()[a][b]);
        CHECK(labels.count(c) == 1);
      }
    CHECK(els.front().is_identity());
  }
  CHECK(Group::d6().order() == 6);
  CHECK(Group::klein4().order() == 4);
  CHECK(Group::d6().compose("g4", "g4") == "g5");
  // Klein four: every element is an involution.
  for (const auto& e : Group::klein4().elements()) CHECK(Group::klein4().compose(e.label, e.label) == "E");
}

TEST_CASE("action on configurations") {
  std::vector<double> x{10, 20, 1, 2, 3, 4, 5, 6};
  CHECK(act(Group::d6().element("E"), x) == x);
  CHECK(act(Group::d6().element("g1"), x) == std::vector<double>{10, 20, 2, 1, 3, 4, 6, 5});

  std::mt19937_64 rng(3);
  const auto& d6 = Group::d6();
  for (int t = 0; t < 20; ++t) {
    auto y = random_vec(rng, 8), z = random_vec(rng, 8);
    CHECK(act(d6.element("g4"), act(d6.element("g4"), y)) == act(d6.element("g5"), y));
    for (const auto& g : d6.elements()) {
      CHECK(dist_inf(act(g, y), act(g, z)) == dist_inf(y, z));
      // 6-variable form agrees with the distance part of the 8-variable one.
      std::vector<double> r(y.begin() + 2, y.end()), gy = act(g, y);
      CHECK(act(g, r) == std::vector<double>(gy.begin() + 2, gy.end()));
    }
  }
  CHECK_THROWS(act(d6.element("g1"), std::vector<double>(5, 1.0)));
}

TEST_CASE("symbolic equivariance") {
  auto d6 = check_equivariance(build_dziobek(MassParams::three_equal()), Group::d6());
  CHECK(d6.equivariant);
  CHECK(d6.equation_perms.size() == 6);
  CHECK(check_equivariance(build_ac(MassParams::three_equal()), Group::d6()).equivariant);
  CHECK(check_equivariance(build_dziobek(MassParams::two_pairs()), Group::klein4()).equivariant);
  auto k4 = check_equivariance(build_ac(MassParams::two_pairs()), Group::klein4());
  CHECK(k4.equivariant);
  CHECK(k4.equation_perms.size() == 4);

  auto generic = check_equivariance(build_dziobek(MassParams::general({1, 2, 3, 4})), Group::d6());
  CHECK_FALSE(generic.equivariant);
  CHECK_FALSE(generic.offending.empty());
  // Two-pairs masses are not D6-symmetric.
  CHECK_FALSE(check_equivariance(build_dziobek(MassParams::two_pairs()), Group::d6()).equivariant);
}

TEST_CASE("isotropy subgroups") {
  auto eq = equilateral_point(0.8);
  auto d = to_dziobek(eq, MassParams::three_equal().at(0.8));
  CHECK(isotropy(std::vector<double>(d.begin(), d.end()), Group::d6()).label == "D6");

  std::vector<double> p = testutil::ref_guess(ref::pitch3);
  p.pop_back();
  IsotropyTag t = isotropy(p, Group::d6(), 1e-9);
  CHECK(t.label == "{E,g3}");
  CHECK(t.order() == 2);

  std::mt19937_64 rng(9);
  CHECK(isotropy(random_vec(rng, 8), Group::d6()).label == "trivial");
  CHECK(isotropy(random_vec(rng, 8), Group::klein4()).label == "trivial");

  std::vector<double> q = testutil::ref_guess(ref::pitch2);
  q.pop_back();
  CHECK(isotropy(q, Group::klein4(), 1e-9).label == "{E,h1}");
}

TEST_CASE("certified isotropy of the fold point") {
  PolySystem sys = build_dziobek(MassParams::three_equal());
  AugmentedSystem aug(sys);
  PrecisionScope p(256);
  bool ok = false;
  auto y = newton_refine(aug, to_reals(testutil::ref_guess(ref::fold3)), &ok);
  REQUIRE(ok);
  KrawczykCertificate c = krawczyk(aug, y, 1e-8, 256);
  REQUIRE(c.verdict == Verdict::UniqueZero);
  Box enc(c.enclosure.begin(), c.enclosure.end() - 1), in(c.input.begin(), c.input.end() - 1);
  IsotropyTag t = isotropy_certified(enc, in, Group::d6());
  CHECK(t.order() == 2);
  CHECK(t.tolerance == 0);

  // Every image of the certified point is again a zero.
  for (const auto& g : Group::d6().elements()) {
    Box gx = act(g, enc);
    gx.push_back(c.enclosure.back());
    for (const auto& e : sys.equations) CHECK(interval_eval(e, gx).contains_zero());
  }
}

TEST_CASE("orbit deduplication") {
  std::mt19937_64 rng(5);
  auto x = random_vec(rng, 8);
  std::vector<std::vector<double>> pts;
  for (const auto& g : Group::d6().elements()) pts.push_back(act(g, x));
  auto orbits = orbit_dedup(pts, Group::d6());
  REQUIRE(orbits.size() == 1);
  CHECK(orbits[0].size == 6);
  CHECK(orbits[0].members.size() == 6);
  for (const auto& q : pts) CHECK(orbits[0].representative <= q);

  std::vector<double> f = testutil::ref_guess(ref::fold3);
  f.pop_back();
  pts.clear();
  for (const auto& g : Group::d6().elements()) pts.push_back(act(g, f));
  orbits = orbit_dedup(pts, Group::d6());
  REQUIRE(orbits.size() == 1);
  CHECK(orbits[0].size == 3);
  CHECK(orbits[0].isotropy.order() == 2);

  auto d = to_dziobek(equilateral_point(1.0), MassParams::three_equal().at(1.0));
  orbits = orbit_dedup({std::vector<double>(d.begin(), d.end())}, Group::d6());
  CHECK(orbits[0].size == 1);
}

TEST_CASE("orbit-stabilizer on the equal-mass seeds") {
  auto seeds = load_seeds(testutil::repo_data("seeds_equal_mass.json"));
  auto orbits = orbit_dedup(seeds, Group::d6());
  std::size_t total = 0;
  for (const auto& o : orbits) {
    CHECK(o.size * o.isotropy.order() == 6);
    total += o.members.size();
  }
  CHECK(total == seeds.size());
  CHECK(orbits.size() == 6);
}
