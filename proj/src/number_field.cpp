#include "ccbif/number_field.h"

#include <cmath>
#include <stdexcept>

namespace ccbif {

Q3& Q3::operator*=(const Q3& o) {
  mpq_class a = a_ * o.a_ + 3 * b_ * o.b_;
  mpq_class b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

Q3 Q3::inverse() const {
  mpq_class n = norm();
  if (n == 0) throw std::domain_error("Q3::inverse: zero divisor");
  return Q3(a_ / n, -b_ / n);
}

int Q3::sign() const {
  int sa = sgn(a_), sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sa == 0 ? sb : sa;
  // opposite signs: compare a² with 3b²
  int c = cmp(a_ * a_, 3 * b_ * b_);
  return c == 0 ? 0 : (c > 0 ? sa : sb);
}

double Q3::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(3.0); }

std::string Q3::str() const {
  if (b_ == 0) return a_.get_str();
  std::string s = a_ == 0 ? "" : a_.get_str() + (b_ > 0 ? " + " : " - ");
  mpq_class ab = (a_ == 0) ? b_ : mpq_class(abs(b_));
  return s + ab.get_str() + "*sqrt(3)";
}

double CubicField::alpha_double() const { return std::cbrt(t_.to_double()); }

void KElem::adopt(const KElem& o) {
  if (!f_) f_ = o.f_;
  else if (o.f_ && o.f_ != f_ && !(o.f_->t() == f_->t()))
    throw std::logic_error("KElem: mixing elements of different fields");
}

KElem& KElem::operator+=(const KElem& o) {
  adopt(o);
  for (int i = 0; i < 3; ++i) c_[i] += o.c_[i];
  return *this;
}

KElem& KElem::operator-=(const KElem& o) {
  adopt(o);
  for (int i = 0; i < 3; ++i) c_[i] -= o.c_[i];
  return *this;
}

KElem& KElem::operator*=(const KElem& o) {
  adopt(o);
  Q3 p[5];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!c_[i].is_zero() && !o.c_[j].is_zero()) p[i + j] += c_[i] * o.c_[j];
  if (!(p[3].is_zero() && p[4].is_zero())) {
    if (!f_) throw std::logic_error("KElem: alpha power without a field");
    p[0] += f_->t() * p[3];
    p[1] += f_->t() * p[4];
  }
  c_[0] = std::move(p[0]);
  c_[1] = std::move(p[1]);
  c_[2] = std::move(p[2]);
  return *this;
}

KElem KElem::inverse() const {
  if (is_zero()) throw std::domain_error("KElem::inverse: zero");
  if (c_[1].is_zero() && c_[2].is_zero()) return KElem(f_, c_[0].inverse());
  const Q3& t = f_->t();
  const Q3 &a = c_[0], &b = c_[1], &c = c_[2];
  // (a + bα + cα²)(A + Bα + Cα²) = a³ + t b³ + t² c³ − 3t abc
  Q3 A = a * a - t * b * c;
  Q3 B = t * c * c - a * b;
  Q3 C = b * b - a * c;
  Q3 n = a * A + t * (b * C + c * B);
  Q3 ni = n.inverse();
  return KElem(f_, A * ni, B * ni, C * ni);
}

double KElem::to_double() const {
  double al = f_ ? f_->alpha_double() : 0.0;
  return c_[0].to_double() + al * (c_[1].to_double() + al * c_[2].to_double());
}

std::string KElem::str() const {
  std::string s;
  const char* tag[3] = {"", "*alpha", "*alpha^2"};
  for (int i = 0; i < 3; ++i) {
    if (c_[i].is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += "(" + c_[i].str() + ")" + tag[i];
  }
  return s.empty() ? "0" : s;
}

}  // namespace ccbif
