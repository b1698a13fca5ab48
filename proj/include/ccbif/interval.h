#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <vector>

#include "ccbif/polynomial.h"

namespace ccbif {

// Working precision for values created without an explicit one.
mpfr_prec_t default_precision();
void set_default_precision(mpfr_prec_t bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
  long saved_digits_;
};

// Closed interval [lo, hi] with MPFR endpoints; all operations round outward.
class Interval {
 public:
  Interval();
  Interval(double v);  // NOLINT: exact
  Interval(int v);     // NOLINT
  explicit Interval(const mpq_class& q, mpfr_prec_t prec = 0);
  Interval(const mpfr_t lo, const mpfr_t hi, mpfr_prec_t prec = 0);
  static Interval hull(double lo, double hi);
  // Parses "d.ddd" or "d.ddd?" (last digit ±1) or "[lo, hi]".
  static Interval parse(const std::string& s, mpfr_prec_t prec = 0);
  static Interval from_strings(const std::string& lo, const std::string& hi, mpfr_prec_t prec = 0);
  static Interval from_hex(const std::string& lo, const std::string& hi, mpfr_prec_t prec);

  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  mpfr_prec_t precision() const { return prec_; }
  const mpfr_t& lo() const { return lo_; }
  const mpfr_t& hi() const { return hi_; }
  double lo_d() const;
  double hi_d() const;
  double mid_d() const;
  double width_d() const;
  double mag() const;  // max |x| over the interval, rounded up
  void mid(mpfr_t out) const;  // nearest midpoint at this precision
  Interval mid() const;        // thin interval at the midpoint
  void rad(mpfr_t out) const;  // upper bound of half width

  bool contains(const Interval& o) const;
  bool contains(double v) const;
  bool contains_zero() const;
  bool strictly_contains(const Interval& o) const;
  bool intersects(const Interval& o) const;
  bool is_thin() const;
  int sign() const;  // +1/-1 when bounded away from zero, 0 otherwise
  Interval intersect(const Interval& o) const;  // throws if disjoint
  Interval hull(const Interval& o) const;
  Interval inflated(double r) const;

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);
  Interval operator-() const;
  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend bool operator==(const Interval& a, const Interval& b);

  std::string lo_str(int digits = 0) const;  // rounded down
  std::string hi_str(int digits = 0) const;  // rounded up
  std::string lo_hex() const;
  std::string hi_hex() const;
  std::string str(int digits = 17) const;
  nlohmann::json to_json(int digits = 0) const;
  static Interval from_json(const nlohmann::json& j, mpfr_prec_t prec = 0);

 private:
  struct NoInit {};
  Interval(NoInit, mpfr_prec_t prec) { init(prec); }
  void init(mpfr_prec_t prec);
  mpfr_prec_t prec_ = 0;
  mpfr_t lo_, hi_;
};

Interval sqr(const Interval& x);
Interval int_power(const Interval& x, unsigned e);
Interval sqrt(const Interval& x);
Interval abs(const Interval& x);

using Box = std::vector<Interval>;

Box make_box(const std::vector<double>& center, double radius);
// [x]_r around a box of (thin) centres given as intervals.
Box make_box(const Box& center, double radius);
std::vector<double> mid_d(const Box& b);
Box mid(const Box& b);
double max_width(const Box& b);
bool contains(const Box& outer, const Box& inner);
bool strictly_contains(const Box& outer, const Box& inner);
bool intersects(const Box& a, const Box& b);
nlohmann::json to_json(const Box& b, int digits = 0);
Box box_from_json(const nlohmann::json& j, mpfr_prec_t prec = 0);

// Rigorous range enclosure of a polynomial over a box.
Interval interval_eval(const Polynomial& p, const Box& box);
Interval to_interval(const mpq_class& q);
inline const auto rational_to_interval = [](const mpq_class& q) { return Interval(q); };

using IntervalMatrix = std::vector<std::vector<Interval>>;

}  // namespace ccbif
