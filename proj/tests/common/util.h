#pragma once

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ccbif/interval.h"
#include "ccbif/polynomial.h"
#include "reference.h"

namespace testutil {

inline std::string test_data(const std::string& name) { return std::string(CCBIF_TEST_DATA) + "/" + name; }
inline std::string repo_data(const std::string& name) { return std::string(CCBIF_REPO_DATA) + "/" + name; }

// Σ|c·x^α|: the natural scale for relative residuals.
inline double abs_eval(const ccbif::Polynomial& p, std::span<const double> x) {
  double s = 0;
  for (const auto& [mono, c] : p.terms()) {
    double t = std::abs(c.get_d());
    for (auto [v, e] : mono.factors()) t *= std::pow(std::abs(x[v]), e);
    s += t;
  }
  return s;
}

inline long double eval_ld(const ccbif::Polynomial& p, std::span<const long double> x) {
  return p.evaluate<long double>(x, [](const mpq_class& q) { return (long double)q.get_d(); });
}

// Box with the reference point followed by m.
inline ccbif::Box ref_box(const ref::Point& p, mpfr_prec_t prec = 256) {
  ccbif::Box b;
  for (const auto& s : p.x) b.push_back(ccbif::Interval::parse(s, prec));
  b.push_back(ccbif::Interval::parse(p.m, prec));
  return b;
}

inline std::vector<double> ref_guess(const ref::Point& p) { return ccbif::mid_d(ref_box(p)); }

inline ccbif::Interval iv(const std::string& s) { return ccbif::Interval::parse(s, 256); }

}  // namespace testutil
