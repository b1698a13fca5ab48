#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>

namespace ccbif {

// a + b·√3 with rational a, b.
class Q3 {
 public:
  Q3() = default;
  Q3(const mpq_class& a) : a_(a) { a_.canonicalize(); }  // NOLINT: implicit embedding of Q
  Q3(int a) : a_(a) {}               // NOLINT
  Q3(const mpq_class& a, const mpq_class& b) : a_(a), b_(b) {
    a_.canonicalize();
    b_.canonicalize();
  }

  static Q3 sqrt3() { return Q3(0, 1); }

  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }

  Q3 conj() const { return Q3(a_, -b_); }
  mpq_class norm() const { return a_ * a_ - 3 * b_ * b_; }
  Q3 inverse() const;
  int sign() const;  // exact sign of the real number a + b√3
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }
  double to_double() const;
  std::string str() const;

  Q3& operator+=(const Q3& o) { a_ += o.a_; b_ += o.b_; return *this; }
  Q3& operator-=(const Q3& o) { a_ -= o.a_; b_ -= o.b_; return *this; }
  Q3& operator*=(const Q3& o);
  Q3& operator/=(const Q3& o) { return *this *= o.inverse(); }
  Q3 operator-() const { return Q3(-a_, -b_); }
  friend Q3 operator+(Q3 x, const Q3& y) { return x += y; }
  friend Q3 operator-(Q3 x, const Q3& y) { return x -= y; }
  friend Q3 operator*(Q3 x, const Q3& y) { return x *= y; }
  friend Q3 operator/(Q3 x, const Q3& y) { return x /= y; }
  friend bool operator==(const Q3& x, const Q3& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

 private:
  mpq_class a_{0};
  mpq_class b_{0};
};

// K = Q3(α) with α³ = t. Elements are c0 + c1·α + c2·α².
class CubicField : public std::enable_shared_from_this<CubicField> {
 public:
  explicit CubicField(Q3 t) : t_(std::move(t)) {}
  const Q3& t() const { return t_; }
  double alpha_double() const;

 private:
  Q3 t_;
};

class KElem {
 public:
  KElem() = default;
  KElem(std::shared_ptr<const CubicField> f, Q3 c0 = Q3(), Q3 c1 = Q3(), Q3 c2 = Q3())
      : f_(std::move(f)), c_{std::move(c0), std::move(c1), std::move(c2)} {}
  static KElem alpha(std::shared_ptr<const CubicField> f) { return KElem(std::move(f), 0, 1, 0); }

  const Q3& coeff(int i) const { return c_[i]; }
  const std::shared_ptr<const CubicField>& field() const { return f_; }
  bool is_zero() const { return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero(); }
  KElem inverse() const;
  double to_double() const;
  std::string str() const;

  KElem& operator+=(const KElem& o);
  KElem& operator-=(const KElem& o);
  KElem& operator*=(const KElem& o);
  KElem& operator/=(const KElem& o) { return *this *= o.inverse(); }
  KElem operator-() const { return KElem(f_, -c_[0], -c_[1], -c_[2]); }
  friend KElem operator+(KElem x, const KElem& y) { return x += y; }
  friend KElem operator-(KElem x, const KElem& y) { return x -= y; }
  friend KElem operator*(KElem x, const KElem& y) { return x *= y; }
  friend KElem operator/(KElem x, const KElem& y) { return x /= y; }
  friend bool operator==(const KElem& x, const KElem& y) {
    return x.c_[0] == y.c_[0] && x.c_[1] == y.c_[1] && x.c_[2] == y.c_[2];
  }

 private:
  void adopt(const KElem& o);
  std::shared_ptr<const CubicField> f_;
  Q3 c_[3];
};

}  // namespace ccbif
