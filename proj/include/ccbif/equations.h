#pragma once

#include <array>
#include <string>
#include <vector>

#include "ccbif/number_field.h"
#include "ccbif/polynomial.h"

namespace ccbif {

enum class MassPattern { ThreeEqual, TwoPairs, General };
enum class SystemKind { Dziobek, AC };

std::string to_string(MassPattern p);
std::string to_string(SystemKind k);
MassPattern parse_mass_pattern(const std::string& s);
SystemKind parse_system_kind(const std::string& s);

// Pair order used everywhere: 12, 13, 14, 23, 24, 34 (bodies 0-based internally).
inline constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
int pair_index(int i, int j);

// Masses (1,1,1,m), (1,1,m,m) or four fixed positive rationals.
struct MassParams {
  MassPattern pattern = MassPattern::ThreeEqual;
  std::array<mpq_class, 4> fixed{1, 1, 1, 1};

  static MassParams three_equal() { return {MassPattern::ThreeEqual, {1, 1, 1, 1}}; }
  static MassParams two_pairs() { return {MassPattern::TwoPairs, {1, 1, 1, 1}}; }
  static MassParams general(const std::array<mpq_class, 4>& m);

  // Numeric masses for parameter value m (ignored for General).
  std::array<double, 4> at(double m) const;
  std::array<mpq_class, 4> at(const mpq_class& m) const;
};

// A square polynomial system in `unknowns` variables plus the mass parameter,
// which is always the last variable (index `unknowns`).
struct PolySystem {
  SystemKind kind = SystemKind::Dziobek;
  MassParams masses;
  std::vector<std::string> variables;
  std::vector<Polynomial> equations;

  std::size_t unknowns() const { return variables.size() - 1; }
  std::size_t arity() const { return variables.size(); }
  std::size_t parameter() const { return variables.size() - 1; }

  nlohmann::json to_json() const;
  static PolySystem from_json(const nlohmann::json& j);
};

// Termwise derivative of every equation.
PolySystem differentiate(const PolySystem& sys, std::span<const unsigned> multi_index);

// Cayley-Menger determinant in the six distances (arity 6).
const Polynomial& cayley_menger_polynomial();
double cayley_menger(const std::array<double, 6>& r);
mpq_class cayley_menger(const std::array<mpq_class, 6>& r);

// Variables (λ₀, μ, r12, r13, r14, r23, r24, r34, m).
PolySystem build_dziobek(const MassParams& masses);
// Variables (r12, r13, r14, r23, r24, r34, m).
PolySystem build_ac(const MassParams& masses);

// Equilateral triangle of bodies 1,2,3 with body 4 at the centre, AC scale.
std::array<double, 6> equilateral_point(double m);
// α³ for the equilateral family at parameter m, exactly.
Q3 equilateral_alpha_cubed(const Q3& m);
// Threefold degenerate mass value (81 + 64√3)/249.
Q3 equilateral_degenerate_mass();
double equilateral_jacobian_det(double m);
Q3 equilateral_jacobian_det(const Q3& m);

// Scale conversions. Distances only; masses numeric.
double inertia(const std::array<double, 6>& r, const std::array<double, 4>& m);
double potential(const std::array<double, 6>& r, const std::array<double, 4>& m);
std::array<double, 6> to_ac_scale(const std::array<double, 6>& r, const std::array<double, 4>& m);
// Rescales to I = 1 and fits (λ₀, μ) by least squares on the six gradient equations.
std::array<double, 8> to_dziobek(const std::array<double, 6>& r, const std::array<double, 4>& m);
std::array<double, 6> distances_of(const std::array<double, 8>& x);

// Squared-area proxy 16·A² of triangle (i,j,k) from the distances (Heron form).
double triangle_area_sq16(const std::array<double, 6>& r, int i, int j, int k);
bool is_collinear(const std::array<double, 6>& r, double tol = 1e-8);

}  // namespace ccbif
