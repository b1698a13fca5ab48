#pragma once

#include <optional>
#include <vector>

#include "ccbif/equations.h"
#include "ccbif/krawczyk.h"

namespace ccbif {

// Restriction of the (x, m) space to a linear subspace spanned by groups of
// identified coordinates: full variable l equals reduced variable map[l].
struct Embedding {
  std::vector<std::size_t> full_to_reduced;  // size = arity of the system
  std::vector<std::size_t> equations;        // equation rows kept
  std::size_t reduced_dim = 0;
  std::string label;

  // Fixed-point subspace of an involutive coordinate permutation acting
  // identically on variables and equations (m is always kept).
  static Embedding fixed_space(std::span<const std::size_t> perm, std::size_t arity, std::string label);
  static Embedding identity(std::size_t arity);
  Box embed(const Box& reduced) const;
  Box restrict(const Box& full) const;
};

struct DetWithGradient {
  Interval det;
  std::vector<Interval> grad;
};

// det(A) and its gradient for A(y) given by entries and their partials,
// evaluated by Gaussian elimination with a fixed (midpoint, full) pivot order.
DetWithGradient det_with_gradient(const IntervalMatrix& a, const std::vector<IntervalMatrix>& da);
Interval interval_det(const IntervalMatrix& a);

// F̃ = (F_rows, det D_xF) in the variables (x, m), optionally restricted.
class AugmentedSystem : public SquareSystem {
 public:
  explicit AugmentedSystem(PolySystem sys, std::optional<Embedding> restriction = std::nullopt);

  std::size_t dim() const override { return emb_.reduced_dim; }
  std::string id() const override;
  Box eval(const Box& y) const override;
  IntervalMatrix jacobian(const Box& y) const override;

  const PolySystem& system() const { return sys_; }
  const Embedding& embedding() const { return emb_; }
  bool restricted() const { return restricted_; }

  // D_xF over a full (x, m) box: n×n.
  IntervalMatrix dx(const Box& full) const;
  // ∂F/∂m over a full box.
  Box dm(const Box& full) const;
  Box residual(const Box& full) const;

 private:
  PolySystem sys_;
  Embedding emb_;
  bool restricted_ = false;
  unsigned max_degree_ = 0;
  std::vector<std::vector<Polynomial>> d1_;               // [i][l], l over all arity
  std::vector<std::vector<std::vector<Polynomial>>> d2_;  // [i][j][l], j over unknowns
};

// F(x) = 0 in the unknowns alone, the mass parameter held at an exact rational.
class FixedParameterSystem : public SquareSystem {
 public:
  FixedParameterSystem(PolySystem sys, mpq_class m);

  std::size_t dim() const override { return sys_.unknowns(); }
  std::string id() const override;
  Box eval(const Box& y) const override;
  IntervalMatrix jacobian(const Box& y) const override;

  const mpq_class& m() const { return m_; }

 private:
  Box full(const Box& y) const;
  PolySystem sys_;
  mpq_class m_;
  unsigned max_degree_ = 0;
  std::vector<std::vector<Polynomial>> d1_;
};

}  // namespace ccbif
