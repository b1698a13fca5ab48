#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ccbif {

// Sparse monomial: sorted (variable, exponent) pairs, zero exponents never stored.
class Monomial {
 public:
  using Factor = std::pair<std::uint16_t, std::uint16_t>;

  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors);
  static Monomial variable(std::size_t var, unsigned exp = 1);

  unsigned exponent(std::size_t var) const;
  unsigned degree() const;
  bool is_one() const { return f_.empty(); }
  const std::vector<Factor>& factors() const { return f_; }

  Monomial operator*(const Monomial& o) const;
  // Lowers the exponent of var by one; caller checks exponent(var) > 0.
  Monomial lowered(std::size_t var, unsigned by = 1) const;
  Monomial renamed(std::span<const std::size_t> map) const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> f_;
};

template <class T>
T int_power(const T& x, unsigned e) {
  T r = x;
  for (unsigned i = 1; i < e; ++i) r = r * x;
  return r;
}

// Powers x_v^e for e ≤ max_degree, shared by many polynomial evaluations.
template <class T>
class PowerTable {
 public:
  PowerTable(std::span<const T> x, unsigned max_degree) : pw_(x.size()) {
    for (std::size_t v = 0; v < x.size(); ++v)
      for (unsigned e = 1; e <= max_degree; ++e) pw_[v].push_back(int_power(x[v], e));
  }
  const T& get(std::size_t v, unsigned e) const { return pw_[v][e - 1]; }
  std::size_t size() const { return pw_.size(); }

 private:
  std::vector<std::vector<T>> pw_;
};

class Polynomial {
 public:
  using Terms = std::map<Monomial, mpq_class>;

  explicit Polynomial(std::size_t arity = 0) : arity_(arity) {}
  static Polynomial constant(std::size_t arity, const mpq_class& c);
  static Polynomial variable(std::size_t arity, std::size_t var);

  std::size_t arity() const { return arity_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const;
  unsigned degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }

  void add_term(const Monomial& m, const mpq_class& c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const mpq_class& c);
  Polynomial operator-() const;
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const mpq_class& c) { return a *= c; }
  friend Polynomial operator*(const mpq_class& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  Polynomial pow(unsigned e) const;
  Polynomial derivative(std::size_t var) const;
  // Mixed partial: multi_index[i] = order in variable i.
  Polynomial derivative(std::span<const unsigned> multi_index) const;
  // Variable i becomes variable map[i]; new arity given.
  Polynomial renamed(std::span<const std::size_t> map, std::size_t new_arity) const;
  Polynomial substituted(std::size_t var, const mpq_class& value) const;
  // Exact division by a monomial; throws if some term is not divisible.
  Polynomial divided(const Monomial& m) const;

  // Generic evaluation; conv maps a rational coefficient into T.
  template <class T, class Conv>
  T evaluate(std::span<const T> x, Conv&& conv) const;

  template <class T, class Conv>
  T evaluate(const PowerTable<T>& table, Conv&& conv) const;

  mpq_class evaluate(std::span<const mpq_class> x) const;
  double evaluate(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static Polynomial from_json(const nlohmann::json& j);

 private:
  std::size_t arity_;
  Terms terms_;
};

template <class T, class Conv>
T Polynomial::evaluate(std::span<const T> x, Conv&& conv) const {
  // Power tables per variable, filled up to the degree actually used.
  std::vector<std::vector<T>> pw(arity_);
  for (const auto& [mono, c] : terms_)
    for (auto [v, e] : mono.factors())
      while (pw[v].size() < e) pw[v].push_back(int_power(x[v], unsigned(pw[v].size() + 1)));
  T acc = conv(mpq_class(0));
  for (const auto& [mono, c] : terms_) {
    T t = conv(c);
    for (auto [v, e] : mono.factors()) t = t * pw[v][e - 1];
    acc = acc + t;
  }
  return acc;
}

template <class T, class Conv>
T Polynomial::evaluate(const PowerTable<T>& table, Conv&& conv) const {
  T acc = conv(mpq_class(0));
  for (const auto& [mono, c] : terms_) {
    T t = conv(c);
    for (auto [v, e] : mono.factors()) t = t * table.get(v, e);
    acc = acc + t;
  }
  return acc;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names);

}  // namespace ccbif
