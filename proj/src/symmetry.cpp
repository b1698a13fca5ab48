#include "ccbif/symmetry.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ccbif {

namespace {

std::array<std::size_t, 6> perm_of(std::initializer_list<const char*> pairs) {
  std::array<std::size_t, 6> p{};
  std::size_t i = 0;
  for (const char* s : pairs) {
    p[i++] = std::size_t(pair_index(s[0] - '1', s[1] - '1'));
  }
  return p;
}

std::vector<std::vector<std::string>> table_of(std::initializer_list<std::initializer_list<const char*>> rows) {
  std::vector<std::vector<std::string>> t;
  for (auto r : rows) t.emplace_back(r.begin(), r.end());
  return t;
}

}  // namespace

std::string to_string(GroupId g) { return g == GroupId::D6 ? "D6" : "Klein4"; }

std::vector<std::size_t> GroupElement::perm8() const { return permutation(8); }

std::vector<std::size_t> GroupElement::permutation(std::size_t dim) const {
  if (dim == 6) return {perm.begin(), perm.end()};
  if (dim == 8) {
    std::vector<std::size_t> p{0, 1};
    for (auto k : perm) p.push_back(k + 2);
    return p;
  }
  throw std::invalid_argument("group action defined on 6 or 8 coordinates, got " + std::to_string(dim));
}

bool GroupElement::is_identity() const {
  for (std::size_t i = 0; i < 6; ++i)
    if (perm[i] != i) return false;
  return true;
}

const Group& Group::d6() {
  static const Group g = [] {
    Group d;
    d.id_ = GroupId::D6;
    auto add = [&](const char* l, std::array<std::size_t, 6> p) { d.elements_.push_back({GroupId::D6, l, p}); };
    add("E", perm_of({"12", "13", "14", "23", "24", "34"}));
    add("g1", perm_of({"13", "12", "14", "23", "34", "24"}));
    add("g2", perm_of({"23", "13", "34", "12", "24", "14"}));
    add("g3", perm_of({"12", "23", "24", "13", "14", "34"}));
    add("g4", perm_of({"13", "23", "34", "12", "14", "24"}));
    add("g5", perm_of({"23", "12", "24", "13", "34", "14"}));
    d.table_ = table_of({{"E", "g1", "g2", "g3", "g4", "g5"},
                         {"g1", "E", "g4", "g5", "g2", "g3"},
                         {"g2", "g5", "E", "g4", "g3", "g1"},
                         {"g3", "g4", "g5", "E", "g1", "g2"},
                         {"g4", "g3", "g1", "g2", "g5", "E"},
                         {"g5", "g2", "g3", "g1", "E", "g4"}});
    d.subgroups_ = {{"trivial", {"E"}},          {"{E,g1}", {"E", "g1"}}, {"{E,g2}", {"E", "g2"}},
                    {"{E,g3}", {"E", "g3"}},     {"{E,g4,g5}", {"E", "g4", "g5"}},
                    {"D6", {"E", "g1", "g2", "g3", "g4", "g5"}}};
    return d;
  }();
  return g;
}

const Group& Group::klein4() {
  static const Group g = [] {
    Group k;
    k.id_ = GroupId::Klein4;
    auto add = [&](const char* l, std::array<std::size_t, 6> p) { k.elements_.push_back({GroupId::Klein4, l, p}); };
    add("E", perm_of({"12", "13", "14", "23", "24", "34"}));
    add("h1", perm_of({"12", "23", "24", "13", "14", "34"}));
    add("h2", perm_of({"12", "14", "13", "24", "23", "34"}));
    add("h3", perm_of({"12", "24", "23", "14", "13", "34"}));
    k.table_ = table_of({{"E", "h1", "h2", "h3"}, {"h1", "E", "h3", "h2"}, {"h2", "h3", "E", "h1"}, {"h3", "h2", "h1", "E"}});
    k.subgroups_ = {{"trivial", {"E"}},
                    {"{E,h1}", {"E", "h1"}},
                    {"{E,h2}", {"E", "h2"}},
                    {"{E,h3}", {"E", "h3"}},
                    {"Klein4", {"E", "h1", "h2", "h3"}}};
    return k;
  }();
  return g;
}

const Group& Group::for_pattern(MassPattern p) {
  switch (p) {
    case MassPattern::ThreeEqual: return d6();
    case MassPattern::TwoPairs: return klein4();
    default: throw std::invalid_argument("no symmetry group for general masses");
  }
}

const GroupElement& Group::element(const std::string& label) const {
  for (const auto& e : elements_)
    if (e.label == label) return e;
  throw std::invalid_argument("unknown element '" + label + "' of " + to_string(id_));
}

std::string Group::compose(const std::string& a, const std::string& b) const {
  // Φ_a(Φ_b x)[i] = x[p_b[p_a[i]]]
  const auto& pa = element(a).perm;
  const auto& pb = element(b).perm;
  std::array<std::size_t, 6> c{};
  for (std::size_t i = 0; i < 6; ++i) c[i] = pb[pa[i]];
  for (const auto& e : elements_)
    if (e.perm == c) return e.label;
  throw std::logic_error("group not closed under composition");
}

std::vector<double> act(const GroupElement& g, const std::vector<double>& x) {
  auto p = g.permutation(x.size());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[p[i]];
  return y;
}

Box act(const GroupElement& g, const Box& x) {
  auto p = g.permutation(x.size());
  Box y;
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(x[p[i]]);
  return y;
}

EquivarianceReport check_equivariance(const PolySystem& sys, const Group& group) {
  const std::size_t n = sys.unknowns();
  if (n != 6 && n != 8) throw std::invalid_argument("check_equivariance: unsupported system size");
  EquivarianceReport rep;
  for (const auto& g : group.elements()) {
    auto p = g.permutation(n);
    // F_i∘Φ_g: variable k is replaced by variable p[k]; the mass parameter is untouched.
    std::vector<std::size_t> rename(sys.arity());
    for (std::size_t k = 0; k < rename.size(); ++k) rename[k] = k < n ? p[k] : k;
    std::vector<std::size_t> eq_perm;
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      Polynomial q = sys.equations[i].renamed(rename, sys.arity());
      std::size_t hit = SIZE_MAX;
      for (std::size_t j = 0; j < n && hit == SIZE_MAX; ++j)
        if (!used[j] && sys.equations[j] == q) hit = j;
      if (hit == SIZE_MAX) {
        rep.equivariant = false;
        rep.offending.emplace_back(g.label, i);
      } else {
        used[hit] = true;
        eq_perm.push_back(hit);
      }
    }
    if (eq_perm.size() != n) eq_perm.clear();
    rep.equation_perms.emplace_back(g.label, std::move(eq_perm));
  }
  return rep;
}

namespace {

IsotropyTag largest_subgroup(const Group& group, const std::set<std::string>& fixing, double tol) {
  const Subgroup* best = nullptr;
  for (const auto& s : group.subgroups()) {
    bool all = std::all_of(s.elements.begin(), s.elements.end(), [&](const std::string& e) { return fixing.count(e); });
    if (all && (!best || s.elements.size() > best->elements.size())) best = &s;
  }
  return {best->label, best->elements, tol};
}

}  // namespace

IsotropyTag isotropy(const std::vector<double>& x, const Group& group, double tol) {
  std::set<std::string> fixing;
  for (const auto& g : group.elements()) {
    auto y = act(g, x);
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(y[i] - x[i]));
    if (d <= tol) fixing.insert(g.label);
  }
  return largest_subgroup(group, fixing, tol);
}

IsotropyTag isotropy_certified(const Box& enclosure, const Box& unique_box, const Group& group) {
  std::set<std::string> fixing;
  for (const auto& g : group.elements()) {
    Box y = act(g, enclosure);
    if (contains(unique_box, y))
      fixing.insert(g.label);
    else if (intersects(y, enclosure))
      throw std::runtime_error("isotropy undecided for " + g.label + ": enclosure too wide");
  }
  return largest_subgroup(group, fixing, 0);
}

std::vector<Orbit> orbit_dedup(const std::vector<std::vector<double>>& solutions, const Group& group, double tol) {
  auto close = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
  };
  // Lexicographic order with tolerance, so that float noise does not split ties.
  auto lex_less = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) <= tol) continue;
      return a[i] < b[i];
    }
    return false;
  };
  std::vector<Orbit> out;
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const auto& x = solutions[s];
    std::vector<std::vector<double>> images;
    for (const auto& g : group.elements()) {
      auto y = act(g, x);
      if (std::none_of(images.begin(), images.end(), [&](const auto& z) { return close(y, z); })) images.push_back(y);
    }
    auto rep = *std::min_element(images.begin(), images.end(), lex_less);
    auto it = std::find_if(out.begin(), out.end(), [&](const Orbit& o) { return close(o.representative, rep); });
    if (it != out.end()) {
      it->members.push_back(s);
      continue;
    }
    Orbit o;
    o.representative = rep;
    o.size = images.size();
    o.members = {s};
    o.isotropy = isotropy(rep, group, tol);
    out.push_back(std::move(o));
  }
  std::sort(out.begin(), out.end(), [&](const Orbit& a, const Orbit& b) { return lex_less(a.representative, b.representative); });
  return out;
}

}  // namespace ccbif
