#include "ccbif/polynomial.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ccbif {

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  for (auto [v, e] : factors) {
    if (e == 0) continue;
    if (!f_.empty() && f_.back().first == v)
      f_.back().second = std::uint16_t(f_.back().second + e);
    else
      f_.emplace_back(v, e);
  }
}

Monomial Monomial::variable(std::size_t var, unsigned exp) {
  return Monomial({{std::uint16_t(var), std::uint16_t(exp)}});
}

unsigned Monomial::exponent(std::size_t var) const {
  for (auto [v, e] : f_)
    if (v == var) return e;
  return 0;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (auto [v, e] : f_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  std::vector<Factor> all = f_;
  all.insert(all.end(), o.f_.begin(), o.f_.end());
  return Monomial(std::move(all));
}

Monomial Monomial::lowered(std::size_t var, unsigned by) const {
  Monomial r;
  for (auto [v, e] : f_) {
    if (v == var) {
      if (e < by) throw std::logic_error("Monomial::lowered: exponent underflow");
      if (e > by) r.f_.emplace_back(v, std::uint16_t(e - by));
    } else {
      r.f_.emplace_back(v, e);
    }
  }
  return r;
}

Monomial Monomial::renamed(std::span<const std::size_t> map) const {
  std::vector<Factor> g;
  g.reserve(f_.size());
  for (auto [v, e] : f_) g.emplace_back(std::uint16_t(map[v]), e);
  return Monomial(std::move(g));
}

Polynomial Polynomial::constant(std::size_t arity, const mpq_class& c) {
  Polynomial p(arity);
  p.add_term(Monomial(), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t arity, std::size_t var) {
  if (var >= arity) throw std::out_of_range("Polynomial::variable: index exceeds arity");
  Polynomial p(arity);
  p.add_term(Monomial::variable(var), 1);
  return p;
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(var));
  return d;
}

void Polynomial::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  arity_ = std::max(arity_, o.arity_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  arity_ = std::max(arity_, o.arity_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, v] : r.terms_) v = -v;
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r(std::max(a.arity_, b.arity_));
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial r = constant(arity_, 1);
  for (unsigned i = 0; i < e; ++i) r = r * *this;
  return r;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial r(arity_);
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(var);
    if (e > 0) r.add_term(m.lowered(var), c * e);
  }
  return r;
}

Polynomial Polynomial::derivative(std::span<const unsigned> multi_index) const {
  unsigned total = 0;
  for (unsigned k : multi_index) total += k;
  if (total > 3) throw std::invalid_argument("Polynomial::derivative: total order above 3");
  Polynomial r = *this;
  for (std::size_t v = 0; v < multi_index.size(); ++v)
    for (unsigned k = 0; k < multi_index[v]; ++k) r = r.derivative(v);
  return r;
}

Polynomial Polynomial::renamed(std::span<const std::size_t> map, std::size_t new_arity) const {
  Polynomial r(new_arity);
  for (const auto& [m, c] : terms_) r.add_term(m.renamed(map), c);
  return r;
}

Polynomial Polynomial::substituted(std::size_t var, const mpq_class& value) const {
  Polynomial r(arity_);
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(var);
    mpq_class f = c;
    for (unsigned i = 0; i < e; ++i) f *= value;
    r.add_term(e ? m.lowered(var, e) : m, f);
  }
  return r;
}

Polynomial Polynomial::divided(const Monomial& d) const {
  Polynomial r(arity_);
  for (const auto& [m, c] : terms_) {
    Monomial q = m;
    for (auto [v, e] : d.factors()) {
      if (q.exponent(v) < e) throw std::domain_error("Polynomial::divided: not divisible");
      q = q.lowered(v, e);
    }
    r.add_term(q, c);
  }
  return r;
}

mpq_class Polynomial::evaluate(std::span<const mpq_class> x) const {
  return evaluate<mpq_class>(x, [](const mpq_class& c) { return c; });
}

double Polynomial::evaluate(std::span<const double> x) const {
  return evaluate<double>(x, [](const mpq_class& c) { return c.get_d(); });
}

nlohmann::json Polynomial::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : terms_) {
    nlohmann::json mono = nlohmann::json::array();
    for (auto [v, e] : m.factors()) mono.push_back({v, e});
    terms.push_back({{"monomial", mono}, {"coef", c.get_str()}});
  }
  return {{"arity", arity_}, {"terms", terms}};
}

Polynomial Polynomial::from_json(const nlohmann::json& j) {
  Polynomial p(j.at("arity").get<std::size_t>());
  for (const auto& t : j.at("terms")) {
    std::vector<Monomial::Factor> f;
    for (const auto& ve : t.at("monomial"))
      f.emplace_back(ve.at(0).get<std::uint16_t>(), ve.at(1).get<std::uint16_t>());
    mpq_class c(t.at("coef").get<std::string>(), 10);
    c.canonicalize();
    p.add_term(Monomial(std::move(f)), c);
  }
  return p;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    mpq_class a = abs(c);
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    bool unit = (a == 1) && !m.is_one();
    if (!unit) os << a.get_str();
    bool star = !unit;
    for (auto [v, e] : m.factors()) {
      if (star) os << "*";
      os << names[v];
      if (e > 1) os << "^" << e;
      star = true;
    }
    first = false;
  }
  return os.str();
}

}  // namespace ccbif
