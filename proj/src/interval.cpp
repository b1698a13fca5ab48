#include "ccbif/interval.h"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ccbif {

namespace {

thread_local mpfr_prec_t g_precision = 256;

struct Tmp {
  explicit Tmp(mpfr_prec_t p) { mpfr_init2(v, p); }
  ~Tmp() { mpfr_clear(v); }
  mpfr_t v;
};

std::string mpfr_to_string(const mpfr_t x, int digits, mpfr_rnd_t rnd) {
  if (mpfr_zero_p(x)) return "0";
  if (digits <= 0) digits = int(mpfr_get_prec(x) * 0.30103) + 2;
  char* s = nullptr;
  std::string fmt = "%." + std::to_string(digits) + "R*g";
  mpfr_asprintf(&s, fmt.c_str(), rnd, x);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

}  // namespace

mpfr_prec_t default_precision() { return g_precision; }

void set_default_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > 65536) throw std::invalid_argument("precision out of range");
  g_precision = bits;
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits)
    : saved_(g_precision), saved_digits_(boost::multiprecision::mpfr_float::default_precision()) {
  set_default_precision(bits);
  boost::multiprecision::mpfr_float::default_precision(unsigned(bits * 0.30103) + 1);
}

PrecisionScope::~PrecisionScope() {
  g_precision = saved_;
  boost::multiprecision::mpfr_float::default_precision(unsigned(saved_digits_));
}

void Interval::init(mpfr_prec_t prec) {
  prec_ = prec ? prec : g_precision;
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
}

Interval::Interval() {
  init(0);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(double v) {
  if (!std::isfinite(v)) throw std::domain_error("Interval: non-finite value");
  init(std::max<mpfr_prec_t>(g_precision, 53));
  mpfr_set_d(lo_, v, MPFR_RNDD);
  mpfr_set_d(hi_, v, MPFR_RNDU);
}

Interval::Interval(int v) : Interval(double(v)) {}

Interval::Interval(const mpq_class& q, mpfr_prec_t prec) {
  init(prec);
  mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const mpfr_t lo, const mpfr_t hi, mpfr_prec_t prec) {
  init(prec);
  mpfr_set(lo_, lo, MPFR_RNDD);
  mpfr_set(hi_, hi, MPFR_RNDU);
  if (mpfr_cmp(lo_, hi_) > 0) throw std::invalid_argument("Interval: lo > hi");
}

Interval Interval::hull(double lo, double hi) {
  Interval a(lo), b(hi);
  return a.hull(b);
}

Interval Interval::from_strings(const std::string& lo, const std::string& hi, mpfr_prec_t prec) {
  Interval r(NoInit{}, prec);
  if (mpfr_set_str(r.lo_, lo.c_str(), 10, MPFR_RNDD) != 0 && mpfr_nan_p(r.lo_))
    throw std::invalid_argument("Interval: bad number '" + lo + "'");
  if (mpfr_set_str(r.hi_, hi.c_str(), 10, MPFR_RNDU) != 0 && mpfr_nan_p(r.hi_))
    throw std::invalid_argument("Interval: bad number '" + hi + "'");
  if (mpfr_cmp(r.lo_, r.hi_) > 0) throw std::invalid_argument("Interval: lo > hi");
  return r;
}

Interval Interval::from_hex(const std::string& lo, const std::string& hi, mpfr_prec_t prec) {
  Interval r(NoInit{}, prec);
  if (mpfr_set_str(r.lo_, lo.c_str(), 16, MPFR_RNDD) != 0 ||
      mpfr_set_str(r.hi_, hi.c_str(), 16, MPFR_RNDU) != 0)
    throw std::invalid_argument("Interval: inexact hexadecimal endpoint");
  return r;
}

Interval Interval::parse(const std::string& s0, mpfr_prec_t prec) {
  std::string s;
  for (char c : s0)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("Interval::parse: empty");
  if (s.front() == '[') {
    auto comma = s.find(',');
    if (comma == std::string::npos || s.back() != ']')
      throw std::invalid_argument("Interval::parse: expected [lo, hi]");
    return from_strings(s.substr(1, comma - 1), s.substr(comma + 1, s.size() - comma - 2), prec);
  }
  if (s.back() != '?') return from_strings(s, s, prec);
  // Question-mark notation: last printed digit uncertain by one unit.
  s.pop_back();
  auto dot = s.find('.');
  int decimals = dot == std::string::npos ? 0 : int(s.size() - dot - 1);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, unsigned(decimals));
  std::string digits = s;
  if (dot != std::string::npos) digits.erase(dot, 1);
  mpq_class v(mpz_class(digits, 10), scale), ulp(mpz_class(1), scale);
  v.canonicalize();
  ulp.canonicalize();
  Interval lo(mpq_class(v - ulp), prec), hi(mpq_class(v + ulp), prec);
  return lo.hull(hi);
}

Interval::Interval(const Interval& o) {
  init(o.prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
  init(o.prec_);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this == &o) return *this;
  if (prec_ != o.prec_) {
    mpfr_set_prec(lo_, o.prec_);
    mpfr_set_prec(hi_, o.prec_);
    prec_ = o.prec_;
  }
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  std::swap(prec_, o.prec_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

double Interval::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid_d() const {
  Tmp m(prec_ + 1);
  mid(m.v);
  return mpfr_get_d(m.v, MPFR_RNDN);
}

double Interval::width_d() const {
  Tmp w(prec_);
  mpfr_sub(w.v, hi_, lo_, MPFR_RNDU);
  return mpfr_get_d(w.v, MPFR_RNDU);
}

double Interval::mag() const {
  return std::max(std::abs(mpfr_get_d(lo_, MPFR_RNDD)), std::abs(mpfr_get_d(hi_, MPFR_RNDU)));
}

void Interval::mid(mpfr_t out) const {
  mpfr_add(out, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(out, out, 1, MPFR_RNDN);
}

Interval Interval::mid() const {
  Tmp m(prec_);
  mid(m.v);
  return Interval(m.v, m.v, prec_);
}

void Interval::rad(mpfr_t out) const {
  Tmp m(prec_);
  mid(m.v);
  Tmp a(prec_), b(prec_);
  mpfr_sub(a.v, m.v, lo_, MPFR_RNDU);
  mpfr_sub(b.v, hi_, m.v, MPFR_RNDU);
  mpfr_max(out, a.v, b.v, MPFR_RNDU);
}

bool Interval::contains(const Interval& o) const {
  return mpfr_lessequal_p(lo_, o.lo_) && mpfr_lessequal_p(o.hi_, hi_);
}

bool Interval::contains(double v) const { return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0; }

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::strictly_contains(const Interval& o) const {
  return mpfr_less_p(lo_, o.lo_) && mpfr_less_p(o.hi_, hi_);
}

bool Interval::intersects(const Interval& o) const {
  return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
}

bool Interval::is_thin() const { return mpfr_equal_p(lo_, hi_); }

int Interval::sign() const {
  if (mpfr_sgn(lo_) > 0) return 1;
  if (mpfr_sgn(hi_) < 0) return -1;
  return 0;
}

Interval Interval::intersect(const Interval& o) const {
  if (!intersects(o)) throw std::domain_error("Interval::intersect: disjoint");
  Interval r(*this);
  if (mpfr_less_p(r.lo_, o.lo_)) mpfr_set(r.lo_, o.lo_, MPFR_RNDD);
  if (mpfr_greater_p(r.hi_, o.hi_)) mpfr_set(r.hi_, o.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& o) const {
  Interval r(*this);
  if (o.prec_ > r.prec_) {
    Interval w(NoInit{}, o.prec_);
    mpfr_set(w.lo_, lo_, MPFR_RNDD);
    mpfr_set(w.hi_, hi_, MPFR_RNDU);
    r = std::move(w);
  }
  if (mpfr_less_p(o.lo_, r.lo_)) mpfr_set(r.lo_, o.lo_, MPFR_RNDD);
  if (mpfr_greater_p(o.hi_, r.hi_)) mpfr_set(r.hi_, o.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::inflated(double r) const {
  Interval out(*this);
  mpfr_sub_d(out.lo_, lo_, r, MPFR_RNDD);
  mpfr_add_d(out.hi_, hi_, r, MPFR_RNDU);
  return out;
}

namespace {
// Result precision of a binary operation.
mpfr_prec_t joint(mpfr_prec_t a, mpfr_prec_t b) { return std::max(a, b); }
}  // namespace

Interval& Interval::operator+=(const Interval& o) {
  mpfr_prec_t p = joint(prec_, o.prec_);
  Tmp l(p), h(p);
  mpfr_add(l.v, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(h.v, hi_, o.hi_, MPFR_RNDU);
  if (p != prec_) {
    mpfr_set_prec(lo_, p);
    mpfr_set_prec(hi_, p);
    prec_ = p;
  }
  mpfr_swap(lo_, l.v);
  mpfr_swap(hi_, h.v);
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  mpfr_prec_t p = joint(prec_, o.prec_);
  Tmp l(p), h(p);
  mpfr_sub(l.v, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(h.v, hi_, o.lo_, MPFR_RNDU);
  if (p != prec_) {
    mpfr_set_prec(lo_, p);
    mpfr_set_prec(hi_, p);
    prec_ = p;
  }
  mpfr_swap(lo_, l.v);
  mpfr_swap(hi_, h.v);
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  mpfr_prec_t p = joint(prec_, o.prec_);
  Tmp l(p), h(p), t(p);
  const int sa = mpfr_sgn(lo_) >= 0 ? 1 : (mpfr_sgn(hi_) <= 0 ? -1 : 0);
  const int sb = mpfr_sgn(o.lo_) >= 0 ? 1 : (mpfr_sgn(o.hi_) <= 0 ? -1 : 0);
  if (sa == 1 && sb == 1) {
    mpfr_mul(l.v, lo_, o.lo_, MPFR_RNDD);
    mpfr_mul(h.v, hi_, o.hi_, MPFR_RNDU);
  } else if (sa == 1 && sb == -1) {
    mpfr_mul(l.v, hi_, o.lo_, MPFR_RNDD);
    mpfr_mul(h.v, lo_, o.hi_, MPFR_RNDU);
  } else if (sa == -1 && sb == 1) {
    mpfr_mul(l.v, lo_, o.hi_, MPFR_RNDD);
    mpfr_mul(h.v, hi_, o.lo_, MPFR_RNDU);
  } else if (sa == -1 && sb == -1) {
    mpfr_mul(l.v, hi_, o.hi_, MPFR_RNDD);
    mpfr_mul(h.v, lo_, o.lo_, MPFR_RNDU);
  } else {
    // General case: extremes among the four endpoint products.
    const mpfr_t* a[2] = {&lo_, &hi_};
    const mpfr_t* b[2] = {&o.lo_, &o.hi_};
    mpfr_set_inf(l.v, 1);
    mpfr_set_inf(h.v, -1);
    for (auto* x : a)
      for (auto* y : b) {
        mpfr_mul(t.v, *x, *y, MPFR_RNDD);
        mpfr_min(l.v, l.v, t.v, MPFR_RNDD);
        mpfr_mul(t.v, *x, *y, MPFR_RNDU);
        mpfr_max(h.v, h.v, t.v, MPFR_RNDU);
      }
  }
  if (p != prec_) {
    mpfr_set_prec(lo_, p);
    mpfr_set_prec(hi_, p);
    prec_ = p;
  }
  mpfr_swap(lo_, l.v);
  mpfr_swap(hi_, h.v);
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.contains_zero()) throw std::domain_error("Interval: division by an interval containing 0");
  mpfr_prec_t p = joint(prec_, o.prec_);
  Interval inv(NoInit{}, p);
  mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
  return *this *= inv;
}

Interval Interval::operator-() const {
  Interval r(*this);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

bool operator==(const Interval& a, const Interval& b) {
  return mpfr_equal_p(a.lo_, b.lo_) && mpfr_equal_p(a.hi_, b.hi_);
}

std::string Interval::lo_str(int digits) const { return mpfr_to_string(lo_, digits, MPFR_RNDD); }
std::string Interval::hi_str(int digits) const { return mpfr_to_string(hi_, digits, MPFR_RNDU); }

std::string Interval::lo_hex() const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", lo_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string Interval::hi_hex() const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", hi_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string Interval::str(int digits) const { return "[" + lo_str(digits) + ", " + hi_str(digits) + "]"; }

nlohmann::json Interval::to_json(int digits) const { return {{"lo", lo_str(digits)}, {"hi", hi_str(digits)}}; }

Interval Interval::from_json(const nlohmann::json& j, mpfr_prec_t prec) {
  return from_strings(j.at("lo").get<std::string>(), j.at("hi").get<std::string>(), prec);
}

Interval sqr(const Interval& x) {
  Interval a = abs(x);
  Tmp l(x.precision()), h(x.precision());
  mpfr_sqr(l.v, a.lo(), MPFR_RNDD);
  mpfr_sqr(h.v, a.hi(), MPFR_RNDU);
  return Interval(l.v, h.v, x.precision());
}

Interval int_power(const Interval& x, unsigned e) {
  if (e == 0) return Interval(1);
  if (e == 1) return x;
  const mpfr_prec_t p = x.precision();
  Tmp l(p), h(p);
  if (e % 2 == 0) {
    Interval a = abs(x);
    mpfr_pow_ui(l.v, a.lo(), e, MPFR_RNDD);
    mpfr_pow_ui(h.v, a.hi(), e, MPFR_RNDU);
  } else {
    mpfr_pow_ui(l.v, x.lo(), e, MPFR_RNDD);
    mpfr_pow_ui(h.v, x.hi(), e, MPFR_RNDU);
  }
  return Interval(l.v, h.v, p);
}

Interval sqrt(const Interval& x) {
  if (mpfr_sgn(x.lo()) < 0) throw std::domain_error("Interval sqrt: negative argument");
  Tmp l(x.precision()), h(x.precision());
  mpfr_sqrt(l.v, x.lo(), MPFR_RNDD);
  mpfr_sqrt(h.v, x.hi(), MPFR_RNDU);
  return Interval(l.v, h.v, x.precision());
}

Interval abs(const Interval& x) {
  if (mpfr_sgn(x.lo()) >= 0) return x;
  if (mpfr_sgn(x.hi()) <= 0) return -x;
  Tmp z(x.precision()), h(x.precision());
  mpfr_set_zero(z.v, 1);
  mpfr_neg(h.v, x.lo(), MPFR_RNDU);
  mpfr_max(h.v, h.v, x.hi(), MPFR_RNDU);
  return Interval(z.v, h.v, x.precision());
}

Box make_box(const std::vector<double>& center, double radius) {
  Box b;
  for (double c : center) b.push_back(Interval(c).inflated(radius));
  return b;
}

Box make_box(const Box& center, double radius) {
  Box b;
  for (const auto& c : center) b.push_back(c.inflated(radius));
  return b;
}

std::vector<double> mid_d(const Box& b) {
  std::vector<double> out;
  for (const auto& x : b) out.push_back(x.mid_d());
  return out;
}

Box mid(const Box& b) {
  Box out;
  for (const auto& x : b) out.push_back(x.mid());
  return out;
}

double max_width(const Box& b) {
  double w = 0;
  for (const auto& x : b) w = std::max(w, x.width_d());
  return w;
}

bool contains(const Box& outer, const Box& inner) {
  if (outer.size() != inner.size()) return false;
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

bool strictly_contains(const Box& outer, const Box& inner) {
  if (outer.size() != inner.size()) return false;
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].strictly_contains(inner[i])) return false;
  return true;
}

bool intersects(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].intersects(b[i])) return false;
  return true;
}

nlohmann::json to_json(const Box& b, int digits) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : b) j.push_back(x.to_json(digits));
  return j;
}

Box box_from_json(const nlohmann::json& j, mpfr_prec_t prec) {
  Box b;
  for (const auto& x : j) b.push_back(Interval::from_json(x, prec));
  return b;
}

Interval to_interval(const mpq_class& q) { return Interval(q); }

Interval interval_eval(const Polynomial& p, const Box& box) {
  if (box.size() < p.arity()) throw std::invalid_argument("interval_eval: box dimension below arity");
  return p.evaluate<Interval>(std::span<const Interval>(box), rational_to_interval);
}

}  // namespace ccbif
