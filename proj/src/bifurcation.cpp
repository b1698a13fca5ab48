#include "ccbif/bifurcation.h"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "ccbif/jet.h"
#include "ccbif/solver.h"

namespace ccbif {

namespace {

using IJet = Jet<Interval, 4>;

bool is_involution(const GroupElement& g) {
  for (std::size_t i = 0; i < 6; ++i)
    if (g.perm[g.perm[i]] != i) return false;
  return !g.is_identity();
}

// Unit null vector of the midpoint D_xF at a point (smallest singular vector).
Eigen::VectorXd numeric_kernel(const AugmentedSystem& aug, const std::vector<double>& full) {
  Box b;
  for (double v : full) b.emplace_back(v);
  IntervalMatrix a = aug.dx(b);
  const auto n = Eigen::Index(a.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[std::size_t(i)][std::size_t(j)].mid_d();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(n - 1);
}

Box negated(const Box& b) {
  Box r;
  for (const auto& x : b) r.push_back(-x);
  return r;
}

nlohmann::json box_json(const Box& b) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : b) {
    auto e = x.to_json();
    e["lo_hex"] = x.lo_hex();
    e["hi_hex"] = x.hi_hex();
    j.push_back(e);
  }
  return j;
}

Box box_from(const nlohmann::json& j, mpfr_prec_t prec) {
  Box b;
  for (const auto& e : j) b.push_back(Interval::from_hex(e.at("lo_hex").get<std::string>(), e.at("hi_hex").get<std::string>(), prec));
  return b;
}

nlohmann::json interval_json(const Interval& x) { return box_json(Box{x})[0]; }

Interval interval_from(const nlohmann::json& e, mpfr_prec_t prec) {
  return Interval::from_hex(e.at("lo_hex").get<std::string>(), e.at("hi_hex").get<std::string>(), prec);
}

bool same(const Interval& a, const Interval& b) { return a == b; }

bool same(const Box& a, const Box& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

}  // namespace

std::string choose_restriction(const PolySystem& sys, const std::vector<double>& guess, double tol) {
  if (sys.masses.pattern == MassPattern::General) return "";
  const Group& group = Group::for_pattern(sys.masses.pattern);
  std::vector<double> x(guess.begin(), guess.begin() + std::ptrdiff_t(sys.unknowns()));
  AugmentedSystem aug(sys);
  Eigen::VectorXd k = numeric_kernel(aug, guess);
  for (const auto& g : group.elements()) {
    if (!is_involution(g)) continue;
    auto y = act(g, x);
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(y[i] - x[i]));
    if (d > tol) continue;
    auto p = g.permutation(x.size());
    double plus = 0, minus = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      plus = std::max(plus, std::abs(k(Eigen::Index(p[i])) + k(Eigen::Index(i))));
      minus = std::max(minus, std::abs(k(Eigen::Index(p[i])) - k(Eigen::Index(i))));
    }
    if (plus < minus) return g.label;  // Rv = −v: the full augmented Jacobian is singular here
  }
  return "";
}

Singularity locate_singularity(const PolySystem& sys, const std::vector<double>& guess, const LocateOptions& opt) {
  if (guess.size() != sys.arity()) throw std::invalid_argument("locate_singularity: guess must hold unknowns and m");
  Singularity s;
  s.restriction = opt.restriction == "auto" ? choose_restriction(sys, guess, opt.symmetry_tol) : opt.restriction;

  std::optional<Embedding> emb;
  if (!s.restriction.empty()) {
    const GroupElement& R = Group::for_pattern(sys.masses.pattern).element(s.restriction);
    auto p = R.permutation(sys.unknowns());
    // The fixed-space reduction keeps one equation per orbit; valid only when
    // R permutes equations exactly as it permutes unknowns.
    auto rep = check_equivariance(sys, Group::for_pattern(sys.masses.pattern));
    for (const auto& [label, perm] : rep.equation_perms)
      if (label == R.label) {
        std::vector<std::size_t> inv(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
        if (perm != p && inv != p) throw std::logic_error("locate_singularity: equation action differs from variable action");
      }
    emb = Embedding::fixed_space(p, sys.arity(), R.label);
  }
  AugmentedSystem aug(sys, emb);
  const Embedding& e = aug.embedding();

  std::vector<double> y(e.reduced_dim, 0.0);
  std::vector<int> count(e.reduced_dim, 0);
  for (std::size_t l = 0; l < guess.size(); ++l) {
    y[e.full_to_reduced[l]] += guess[l];
    ++count[e.full_to_reduced[l]];
  }
  for (std::size_t k = 0; k < y.size(); ++k) y[k] /= count[k];

  for (mpfr_prec_t prec = opt.precision; prec <= opt.max_precision; prec *= 2) {
    PrecisionScope scope(prec);
    bool conv = false;
    auto yr = newton_refine(aug, to_reals(y), &conv);
    if (!conv) throw CertificationError("Newton did not converge on the augmented system", prec * 2);
    s.krawczyk = krawczyk_sweep(aug, yr, prec, prec);
    if (s.krawczyk.verdict == Verdict::UniqueZero) break;
  }
  if (s.krawczyk.verdict != Verdict::UniqueZero)
    throw CertificationError("Krawczyk test inconclusive: " + s.krawczyk.reason, opt.max_precision * 2);

  PrecisionScope scope(s.krawczyk.precision);
  s.x = e.embed(s.krawczyk.enclosure);
  IntervalMatrix a = aug.dx(s.x);
  s.echelon = interval_gauss_echelon(a);
  s.echelon_t = interval_gauss_echelon(transpose(a));
  // det D_xF = 0 holds at the certified zero, so rank ≥ n−1 pins the nullity.
  s.nullity_one = s.echelon.nullity_one(true) && s.echelon_t.nullity_one(true);
  if (!s.nullity_one) throw CertificationError("nullity one not certified: rank bound " +
                                               std::to_string(s.echelon.rank_lower_bound), s.krawczyk.precision * 2);
  s.v = kernel_vector(s.echelon);
  s.w = kernel_vector(s.echelon_t);
  return s;
}

SotomayorQuantities sotomayor_quantities(const PolySystem& sys, const Box& x, const Box& v, const Box& w) {
  const std::size_t n = sys.unknowns(), p = sys.parameter();
  std::vector<IJet> xj;
  for (std::size_t l = 0; l < n; ++l) xj.emplace_back(x[l], v[l]);
  xj.emplace_back(x[p]);
  auto conv = [](const mpq_class& q) { return IJet(Interval(q)); };
  SotomayorQuantities q{Interval(0), Interval(0), Interval(0), Interval(0)};
  for (std::size_t i = 0; i < n; ++i) {
    IJet f = sys.equations[i].evaluate(std::span<const IJet>(xj), conv);
    IJet fm = sys.equations[i].derivative(p).evaluate(std::span<const IJet>(xj), conv);
    q.q1 += w[i] * fm.c[0];
    q.q2 += w[i] * fm.c[1];
    q.q3 += w[i] * (Interval(2) * f.c[2]);
    q.q4 += w[i] * (Interval(6) * f.c[3]);
  }
  return q;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Fold: return "fold";
    case Classification::Transcritical: return "transcritical";
    case Classification::PitchforkSupercritical: return "pitchfork-supercritical";
    case Classification::PitchforkSubcritical: return "pitchfork-subcritical";
    case Classification::Unresolved: return "unresolved";
  }
  return "?";
}

Classification parse_classification(const std::string& s) {
  for (auto c : {Classification::Fold, Classification::Transcritical, Classification::PitchforkSupercritical,
                 Classification::PitchforkSubcritical, Classification::Unresolved})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown classification '" + s + "'");
}

std::string to_string(SymmetryRoute r) { return r == SymmetryRoute::Direct ? "direct" : "Z2-lemma"; }

Classification classify(const SotomayorQuantities& q, const VanishingFacts& facts) {
  if (facts.q1_zero && facts.q3_zero) {
    int s2 = q.q2.sign(), s4 = q.q4.sign();
    if (s2 == 0 || s4 == 0) return Classification::Unresolved;
    return s2 * s4 < 0 ? Classification::PitchforkSupercritical : Classification::PitchforkSubcritical;
  }
  if (facts.q1_zero) {
    // Not exercised by the configurations studied here.
    if (q.q2.sign() != 0 && q.q3.sign() != 0) return Classification::Transcritical;
    return Classification::Unresolved;
  }
  if (q.q1.sign() != 0 && q.q3.sign() != 0) return Classification::Fold;
  return Classification::Unresolved;
}

Z2Report z2_vanishing_check(const GroupElement& R, bool rx_certified, const Box& v, const Box& w) {
  if (!rx_certified) throw std::invalid_argument("z2_vanishing_check: R x0 = x0 must be certified first");
  Z2Report rep;
  rep.element = R.label;
  if (R.is_identity()) {
    rep.reasoning = "R is the identity: Rv = v trivially, nothing vanishes";
    return rep;
  }
  auto decide = [&](const Box& u, const char* name) {
    Box Ru = act(R, u);
    bool sym = intersects(Ru, u), anti = intersects(Ru, negated(u));
    if (sym && anti)
      throw std::domain_error(std::string("z2_vanishing_check: both R") + name + " = ±" + name +
                              " are consistent with the enclosure; tighten it");
    if (!sym && !anti) throw std::domain_error(std::string("z2_vanishing_check: neither R") + name + " = ±" + name + " holds");
    return anti;
  };
  rep.v_antisymmetric = decide(v, "v");
  rep.w_antisymmetric = decide(w, "w");
  if (rep.v_antisymmetric != rep.w_antisymmetric)
    throw std::domain_error("z2_vanishing_check: v and w lie in different isotypic components");
  std::ostringstream os;
  if (rep.v_antisymmetric) {
    rep.facts = {true, true};
    os << "R=" << R.label << " fixes x0 and the kernel is one-dimensional, so Rv = ±v; the enclosure excludes Rv = v, "
       << "hence Rv = -v and Rw = -w. F_m(x0) and D2F(x0)(v,v) are R-invariant, so q1 = q3 = 0 exactly.";
  } else {
    os << "R=" << R.label << " fixes x0 and Rv = v; no quantity is forced to vanish.";
  }
  rep.reasoning = os.str();
  return rep;
}

BifurcationCertificate sotomayor_classify(const PolySystem& sys, const Singularity& s) {
  if (!s.nullity_one) throw std::invalid_argument("sotomayor_classify: nullity-one certificate required");
  PrecisionScope scope(s.krawczyk.precision);
  BifurcationCertificate c;
  c.system_id = s.krawczyk.system_id;
  c.family = sys.masses.pattern;
  c.precision = s.krawczyk.precision;
  c.krawczyk = s.krawczyk;
  c.restriction = s.restriction;
  c.x = s.x;
  c.rank_lower_bound = s.echelon.rank_lower_bound;
  c.nullity_one = s.nullity_one;
  c.v = s.v.v;
  c.w = s.w.v;
  c.v_normalized = s.v.normalized;
  c.w_normalized = s.w.normalized;
  c.q = sotomayor_quantities(sys, c.x, c.v, c.w);

  VanishingFacts facts;
  if (!s.restriction.empty()) {
    const GroupElement& R = Group::for_pattern(sys.masses.pattern).element(s.restriction);
    // x lies in Fix(R) by construction of the restricted certificate.
    c.z2 = z2_vanishing_check(R, true, c.v, c.w);
    facts = c.z2->facts;
    if (facts.q1_zero) c.route = SymmetryRoute::Z2Lemma;
  }
  if (c.route == SymmetryRoute::Z2Lemma && c.q.q2.sign() < 0) {
    c.w_flipped = true;
    for (auto& x : c.w) x = -x;
    c.q = {-c.q.q1, -c.q.q2, -c.q.q3, -c.q.q4};
  }
  c.classification = classify(c.q, facts);
  return c;
}

nlohmann::json BifurcationCertificate::to_json() const {
  nlohmann::json j;
  j["type"] = "bifurcation";
  j["system_id"] = system_id;
  j["family"] = ccbif::to_string(family);
  j["precision_bits"] = precision;
  j["krawczyk"] = krawczyk.to_json();
  j["restriction"] = restriction;
  j["box"] = box_json(x);
  j["m"] = interval_json(m());
  j["nullity"] = {{"rank_lower_bound", rank_lower_bound}, {"nullity_one", nullity_one}};
  j["v"] = box_json(v);
  j["w"] = box_json(w);
  j["v_normalized_component"] = v_normalized;
  j["w_normalized_component"] = w_normalized;
  j["w_flipped"] = w_flipped;
  j["q1"] = interval_json(q.q1);
  j["q2"] = interval_json(q.q2);
  j["q3"] = interval_json(q.q3);
  j["q4"] = interval_json(q.q4);
  j["route"] = ccbif::to_string(route);
  if (z2) {
    j["z2"] = {{"element", z2->element},
               {"v_antisymmetric", z2->v_antisymmetric},
               {"w_antisymmetric", z2->w_antisymmetric},
               {"q1_zero", z2->facts.q1_zero},
               {"q3_zero", z2->facts.q3_zero},
               {"reasoning", z2->reasoning}};
  }
  j["classification"] = ccbif::to_string(classification);
  return j;
}

BifurcationCertificate BifurcationCertificate::from_json(const nlohmann::json& j) {
  BifurcationCertificate c;
  c.system_id = j.at("system_id").get<std::string>();
  c.family = parse_mass_pattern(j.at("family").get<std::string>());
  c.precision = j.at("precision_bits").get<mpfr_prec_t>();
  c.krawczyk = KrawczykCertificate::from_json(j.at("krawczyk"));
  c.restriction = j.value("restriction", "");
  c.x = box_from(j.at("box"), c.precision);
  c.rank_lower_bound = j.at("nullity").at("rank_lower_bound").get<std::size_t>();
  c.nullity_one = j.at("nullity").at("nullity_one").get<bool>();
  c.v = box_from(j.at("v"), c.precision);
  c.w = box_from(j.at("w"), c.precision);
  c.v_normalized = j.value("v_normalized_component", std::size_t(0));
  c.w_normalized = j.value("w_normalized_component", std::size_t(0));
  c.w_flipped = j.value("w_flipped", false);
  c.q = {interval_from(j.at("q1"), c.precision), interval_from(j.at("q2"), c.precision),
         interval_from(j.at("q3"), c.precision), interval_from(j.at("q4"), c.precision)};
  c.route = j.at("route").get<std::string>() == "Z2-lemma" ? SymmetryRoute::Z2Lemma : SymmetryRoute::Direct;
  if (j.contains("z2")) {
    const auto& z = j.at("z2");
    Z2Report r;
    r.element = z.at("element").get<std::string>();
    r.v_antisymmetric = z.at("v_antisymmetric").get<bool>();
    r.w_antisymmetric = z.at("w_antisymmetric").get<bool>();
    r.facts = {z.at("q1_zero").get<bool>(), z.at("q3_zero").get<bool>()};
    r.reasoning = z.value("reasoning", "");
    c.z2 = r;
  }
  c.classification = parse_classification(j.at("classification").get<std::string>());
  return c;
}

bool verify_bifurcation(const BifurcationCertificate& cert, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  MassParams masses = cert.family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal();
  PolySystem sys = build_dziobek(masses);
  std::optional<Embedding> emb;
  if (!cert.restriction.empty())
    emb = Embedding::fixed_space(Group::for_pattern(cert.family).element(cert.restriction).permutation(sys.unknowns()),
                                 sys.arity(), cert.restriction);
  AugmentedSystem aug(sys, emb);
  if (aug.id() != cert.krawczyk.system_id) return fail("system id mismatch: " + aug.id());
  std::string kwhy;
  if (!verify_krawczyk(aug, cert.krawczyk, &kwhy)) return fail("Krawczyk: " + kwhy);
  PrecisionScope scope(cert.precision);

  // Replay the enclosure refinement and the rest of the pipeline.
  KrawczykCertificate again = krawczyk(aug, [&] {
    std::vector<Real> c;
    for (const auto& x : cert.krawczyk.center) c.push_back(to_real(x));
    return c;
  }(), cert.krawczyk.radius, cert.precision);
  Singularity s;
  s.krawczyk = again;
  s.restriction = cert.restriction;
  s.x = aug.embedding().embed(again.enclosure);
  if (!same(s.x, cert.x)) return fail("enclosure differs");
  IntervalMatrix a = aug.dx(s.x);
  s.echelon = interval_gauss_echelon(a);
  s.echelon_t = interval_gauss_echelon(transpose(a));
  s.nullity_one = s.echelon.nullity_one(true) && s.echelon_t.nullity_one(true);
  if (s.nullity_one != cert.nullity_one || s.echelon.rank_lower_bound != cert.rank_lower_bound)
    return fail("nullity certificate differs");
  if (!s.nullity_one) return fail("nullity one not certified");
  s.v = kernel_vector(s.echelon);
  s.w = kernel_vector(s.echelon_t);
  BifurcationCertificate c = sotomayor_classify(sys, s);
  if (!same(c.v, cert.v) || !same(c.w, cert.w)) return fail("kernel vectors differ");
  if (!same(c.q.q1, cert.q.q1) || !same(c.q.q2, cert.q.q2) || !same(c.q.q3, cert.q.q3) || !same(c.q.q4, cert.q.q4))
    return fail("Sotomayor quantities differ");
  if (c.classification != cert.classification) return fail("classification differs");
  return true;
}

std::string proof_sketch(const BifurcationCertificate& c) {
  std::ostringstream os;
  const bool restricted = !c.restriction.empty();
  os << "1. Krawczyk (" << c.precision << " bits, r = " << c.krawczyk.radius << ") proves that the augmented system "
     << c.system_id << " (equations plus det D_xF" << (restricted ? ", restricted to Fix(" + c.restriction + ")" : "")
     << ") has a unique zero in the input box; its m-component lies in " << c.m().str(30) << ".\n";
  os << "2. Hence det D_xF = 0 there. Interval Gauss elimination of D_xF over the enclosure certifies "
     << c.rank_lower_bound << " non-zero pivots, so the null space is one-dimensional.\n";
  os << "3. Back-substitution gives enclosures of v (component " << c.v_normalized + 1 << " = 1) and w (component "
     << c.w_normalized + 1 << " = 1" << (c.w_flipped ? ", then negated so q2 > 0" : "") << ").\n";
  os << "4. q1 = w.F_m in " << c.q.q1.str(15) << "\n   q2 = w.[DF_m v] in " << c.q.q2.str(15)
     << "\n   q3 = w.[D2F(v,v)] in " << c.q.q3.str(15) << "\n   q4 = w.[D3F(v,v,v)] in " << c.q.q4.str(15) << "\n";
  if (c.z2) os << "5. Symmetry: " << c.z2->reasoning << "\n";
  os << (c.z2 ? "6" : "5") << ". Conclusion: " << to_string(c.classification);
  switch (c.classification) {
    case Classification::Fold: os << " (q1 and q3 are bounded away from 0)"; break;
    case Classification::PitchforkSupercritical: os << " (q2*q4 < 0: the new branches exist for m > m0)"; break;
    case Classification::PitchforkSubcritical: os << " (q2*q4 > 0: the new branches exist for m < m0)"; break;
    default: break;
  }
  os << ".\n";
  return os.str();
}

std::vector<BranchSeed> branch_switch(const PolySystem& sys, const BifurcationCertificate& cert, double dm,
                                      double neighbourhood) {
  const std::size_t n = sys.unknowns();
  const Group& group = Group::for_pattern(sys.masses.pattern);
  std::vector<double> x0(n), v(n);
  double xnorm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x0[i] = cert.x[i].mid_d();
    v[i] = cert.v[i].mid_d();
    xnorm = std::max(xnorm, std::abs(x0[i]));
  }
  const double m = cert.m().mid_d() + dm;
  std::vector<double> deltas;
  // Normal form q₂·dm·s + q₄·s³/6 = 0.
  double s2 = -6 * cert.q.q2.mid_d() * dm / cert.q.q4.mid_d();
  if (s2 > 0) deltas.push_back(std::sqrt(s2));
  for (double f : {1e-4, 1e-3, 1e-2}) deltas.push_back(f * xnorm);

  const CompiledSystem f(sys);
  std::vector<BranchSeed> out;
  auto consider = [&](const std::vector<double>& start, double delta) {
    auto r = newton(f, start, m);
    if (!r.converged) return false;
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r.x[i] - x0[i]));
    if (d > neighbourhood) return true;
    for (const auto& s : out) {
      double e = 0;
      for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(r.x[i] - s.x[i]));
      if (e < 1e-6) return true;
    }
    out.push_back({m, r.x, isotropy(r.x, group, 1e-7), delta});
    return true;
  };
  bool any = consider(x0, 0);
  for (double delta : deltas)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = x0[i] + sign * delta * v[i];
      any = consider(t, sign * delta) || any;
    }
  if (!any) throw std::runtime_error("branch_switch: Newton correction failed for every trial");
  return out;
}

}  // namespace ccbif
