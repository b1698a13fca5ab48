#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccbif/augmented.h"
#include "ccbif/echelon.h"
#include "ccbif/equations.h"
#include "ccbif/krawczyk.h"
#include "ccbif/symmetry.h"

namespace ccbif {

// Krawczyk could not certify; suggested_precision is the next precision worth trying.
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, mpfr_prec_t suggested)
      : std::runtime_error(what), suggested_precision(suggested) {}
  mpfr_prec_t suggested_precision;
};

struct LocateOptions {
  mpfr_prec_t precision = 256;
  mpfr_prec_t max_precision = 1024;
  // Element label whose fixed space restricts the augmented system; "auto"
  // picks one when the guess is symmetric and the kernel antisymmetric, "" never restricts.
  std::string restriction = "auto";
  double symmetry_tol = 1e-6;
};

struct Singularity {
  KrawczykCertificate krawczyk;
  std::string restriction;  // element label, empty for the full system
  Box x;                    // (x, m) enclosure in the full variables
  EchelonForm echelon;      // of D_xF over x
  EchelonForm echelon_t;    // of D_xFᵀ
  bool nullity_one = false;
  KernelVector v;
  KernelVector w;
};

// guess: unknowns followed by m.
Singularity locate_singularity(const PolySystem& sys, const std::vector<double>& guess,
                               const LocateOptions& opt = {});

// Label of a fixed-space restriction suited to the guess, or empty.
std::string choose_restriction(const PolySystem& sys, const std::vector<double>& guess, double tol = 1e-6);

struct SotomayorQuantities {
  Interval q1;  // wᵀF_m
  Interval q2;  // wᵀ[DF_m v]
  Interval q3;  // wᵀ[D²F(v,v)]
  Interval q4;  // wᵀ[D³F(v,v,v)]
};

SotomayorQuantities sotomayor_quantities(const PolySystem& sys, const Box& x, const Box& v, const Box& w);

enum class Classification { Fold, Transcritical, PitchforkSupercritical, PitchforkSubcritical, Unresolved };
std::string to_string(Classification c);
Classification parse_classification(const std::string& s);

enum class SymmetryRoute { Direct, Z2Lemma };
std::string to_string(SymmetryRoute r);

// Quantities known to vanish exactly by an independent argument.
struct VanishingFacts {
  bool q1_zero = false;
  bool q3_zero = false;
};

// Pure decision table; invariant under v → −v and w → −w.
Classification classify(const SotomayorQuantities& q, const VanishingFacts& facts);

struct Z2Report {
  std::string element;
  bool v_antisymmetric = false;  // Rv = −v (otherwise Rv = v)
  bool w_antisymmetric = false;
  VanishingFacts facts;
  std::string reasoning;
};

// Requires R x₀ = x₀ to be certified (rx_certified); decides Rv = ±v and Rw = ±w
// from the enclosures, throwing when both or neither alternative is consistent.
Z2Report z2_vanishing_check(const GroupElement& R, bool rx_certified, const Box& v, const Box& w);

struct BifurcationCertificate {
  std::string system_id;
  MassPattern family = MassPattern::ThreeEqual;
  mpfr_prec_t precision = 256;
  KrawczykCertificate krawczyk;
  std::string restriction;
  Box x;
  std::size_t rank_lower_bound = 0;
  bool nullity_one = false;
  Box v, w;
  std::size_t v_normalized = 0, w_normalized = 0;
  bool w_flipped = false;  // w negated so that q₂ > 0 (pitchfork route)
  SotomayorQuantities q;
  SymmetryRoute route = SymmetryRoute::Direct;
  std::optional<Z2Report> z2;
  Classification classification = Classification::Unresolved;

  const Interval& m() const { return x.back(); }
  nlohmann::json to_json() const;
  static BifurcationCertificate from_json(const nlohmann::json& j);
};

BifurcationCertificate sotomayor_classify(const PolySystem& sys, const Singularity& s);

// Recomputes everything from the stored Krawczyk centre; true iff all stored
// intervals and the classification match bit for bit.
bool verify_bifurcation(const BifurcationCertificate& cert, std::string* why);

struct BranchSeed {
  double m;
  std::vector<double> x;
  IsotropyTag isotropy;
  double delta;  // amplitude along v of the trial that produced it
};

// Newton-corrected solutions at m₀ + dm near the certified point, from trials
// x₀ and x₀ ± δ·mid(v) with δ from the normal form and δ ∈ {1e-4, 1e-3, 1e-2}·‖x₀‖.
// Solutions farther than `neighbourhood` from x₀ are discarded.
std::vector<BranchSeed> branch_switch(const PolySystem& sys, const BifurcationCertificate& cert, double dm,
                                      double neighbourhood = 0.05);

// Human-readable proof outline of a certificate.
std::string proof_sketch(const BifurcationCertificate& cert);

}  // namespace ccbif
