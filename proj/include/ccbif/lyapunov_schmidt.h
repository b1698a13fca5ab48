#pragma once

#include <gmpxx.h>

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccbif/number_field.h"

namespace ccbif {

// Reduction of the AC system for masses (1,1,1,m) at the equilateral point
// a(α), m = m_* = (81+64√3)/249, where D_z f has a two-dimensional kernel.
// Variables split as z = (v, u), v = (r12, r13, r14, r23), u = (r24, r34);
// with m = m_* + ε and z = a(m) + εb + ε²c the order-ε² bifurcation equations
// in (b5, b6) are computed exactly over K = Q(√3)(α), α³ = t.
struct LSExpansion {
  int order = 2;
  Q3 m_star;
  Q3 t;  // α³
  std::shared_ptr<const CubicField> field;
  std::array<KElem, 6> base;  // a(α)

  // b_k = rel_b5[k]·b5 + rel_b6[k]·b6 for k = 1..4 (indices 0..3).
  std::array<KElem, 4> rel_b5, rel_b6;

  // Rows of G: coefficients of (b5², b5·b6, b6², b5, b6).
  std::array<std::array<KElem, 5>, 2> g;
  // Row 1 = (b6 + 2b5)(C·b6 + E), row 2 = (b5 + 2b6)(C·b5 + E).
  KElem C, E;

  // α = k·β/P_d with β³ = f·P_n·P_d², f cube-free.
  Q3 p_n, p_d;
  mpq_class k;
  mpz_class f;
  Q3 beta_cubed;

  // Normalized bifurcation coefficients: p1·b6 + p2 ∝ C·b6 + E with p1 a
  // positive integer and p2 = β·(u + v√3), u, v coprime integers.
  mpq_class p1;
  Q3 p2_over_beta;
  double p2 = 0;
  double p3 = 0;  // p1/p2

  // Non-trivial solution scale s = p2/p1 = E/C and the four order-2 solutions.
  KElem s;
  std::vector<std::array<KElem, 2>> solutions;  // (b5, b6)
  // Order-ε² components c1..c4 for each solution (c5 = c6 = 0).
  std::vector<std::array<KElem, 4>> c;

  // G evaluated exactly at (b5, b6).
  std::array<KElem, 2> residual(const KElem& b5, const KElem& b6) const;
  std::string report() const;
};

class LSError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LSExpansion ls_reduce(int order = 2);

}  // namespace ccbif
