#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <vector>

#include "ccbif/interval.h"

namespace ccbif {

using Real = boost::multiprecision::mpfr_float;

Interval to_interval(const Real& x);
Real to_real(const Interval& x);  // midpoint
std::vector<Real> to_reals(const std::vector<double>& x);
Box thin_box(const std::vector<Real>& x);

// A square system with interval enclosures of values and Jacobian.
class SquareSystem {
 public:
  virtual ~SquareSystem() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;
  virtual Box eval(const Box& y) const = 0;
  virtual IntervalMatrix jacobian(const Box& y) const = 0;
};

enum class Verdict { UniqueZero, NoZero, Inconclusive };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct KrawczykCertificate {
  std::string system_id;
  Box center;            // thin
  double radius = 0;
  Box input;             // [x]_r
  Box image;             // K(x, [x]_r)
  Box enclosure;         // refined enclosure of the zero (unique-zero only)
  Verdict verdict = Verdict::Inconclusive;
  mpfr_prec_t precision = 256;
  std::string preconditioner_hash;
  std::string reason;

  nlohmann::json to_json() const;
  static KrawczykCertificate from_json(const nlohmann::json& j);
};

// Damped Newton at the working precision using midpoints of the interval
// evaluations. Returns the final iterate; `converged` set on success.
std::vector<Real> newton_refine(const SquareSystem& f, std::vector<Real> y, bool* converged,
                                int max_iter = 60);

// One Krawczyk test on [x]_r at the given precision.
KrawczykCertificate krawczyk(const SquareSystem& f, const std::vector<Real>& x, double r,
                             mpfr_prec_t precision);

// Tries the radii in order (default 1e-6 … 1e-12) and returns the first unique-zero;
// doubles precision on inconclusive results up to max_precision.
KrawczykCertificate krawczyk_sweep(const SquareSystem& f, const std::vector<Real>& x,
                                   mpfr_prec_t precision, mpfr_prec_t max_precision = 4096,
                                   std::vector<double> radii = {1e-6, 1e-8, 1e-10, 1e-12});

// Recomputes the certificate from its stored centre, radius and precision;
// true iff verdict and image box match bit for bit.
bool verify_krawczyk(const SquareSystem& f, const KrawczykCertificate& cert, std::string* why);

// Short stable identifier derived from the system id and the enclosure bounds.
std::string fingerprint(const KrawczykCertificate& cert);

// Midpoint inverse of an interval matrix at the current precision.
std::vector<std::vector<Real>> midpoint_inverse(const IntervalMatrix& a, bool* ok);

}  // namespace ccbif
