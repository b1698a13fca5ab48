#include "ccbif/augmented.h"

#include <algorithm>
#include <stdexcept>

namespace ccbif {

Embedding Embedding::fixed_space(std::span<const std::size_t> perm, std::size_t arity, std::string label) {
  Embedding e;
  e.label = std::move(label);
  e.full_to_reduced.assign(arity, SIZE_MAX);
  auto image = [&](std::size_t l) { return l < perm.size() ? perm[l] : l; };
  for (std::size_t l = 0; l < arity; ++l) {
    if (e.full_to_reduced[l] != SIZE_MAX) continue;
    std::size_t k = e.reduced_dim++;
    for (std::size_t t = l; e.full_to_reduced[t] == SIZE_MAX; t = image(t)) e.full_to_reduced[t] = k;
    // Only rows of unknowns carry equations; keep one per orbit.
    if (l < perm.size()) e.equations.push_back(l);
  }
  // One equation per reduced unknown except m, which is fixed by det.
  if (e.equations.size() + 1 != e.reduced_dim)
    throw std::logic_error("Embedding::fixed_space: permutation must fix the parameter");
  return e;
}

Embedding Embedding::identity(std::size_t arity) {
  Embedding e;
  e.label = "full";
  e.reduced_dim = arity;
  for (std::size_t l = 0; l < arity; ++l) e.full_to_reduced.push_back(l);
  for (std::size_t i = 0; i + 1 < arity; ++i) e.equations.push_back(i);
  return e;
}

Box Embedding::embed(const Box& reduced) const {
  if (reduced.size() != reduced_dim) throw std::invalid_argument("Embedding::embed: dimension mismatch");
  Box full;
  for (std::size_t k : full_to_reduced) full.push_back(reduced[k]);
  return full;
}

Box Embedding::restrict(const Box& full) const {
  Box r(reduced_dim);
  std::vector<bool> set(reduced_dim, false);
  for (std::size_t l = 0; l < full_to_reduced.size(); ++l) {
    std::size_t k = full_to_reduced[l];
    r[k] = set[k] ? r[k].intersect(full[l]) : full[l];
    set[k] = true;
  }
  return r;
}

DetWithGradient det_with_gradient(const IntervalMatrix& a0, const std::vector<IntervalMatrix>& da0) {
  IntervalMatrix a = a0;
  std::vector<IntervalMatrix> da = da0;
  const std::size_t n = a.size(), K = da.size();
  int sign = 1;
  Interval P(1);
  std::vector<Interval> dP(K, Interval(0));
  for (std::size_t c = 0; c < n; ++c) {
    // Full pivoting on midpoint magnitude; ties go to the lowest (row, column).
    std::size_t pr = c, pc = c;
    double best = -1;
    for (std::size_t i = c; i < n; ++i)
      for (std::size_t j = c; j < n; ++j) {
        double v = std::abs(a[i][j].mid_d());
        if (v > best) best = v, pr = i, pc = j;
      }
    if (pr != c) {
      std::swap(a[pr], a[c]);
      for (auto& d : da) std::swap(d[pr], d[c]);
      sign = -sign;
    }
    if (pc != c) {
      for (std::size_t i = 0; i < n; ++i) {
        std::swap(a[i][pc], a[i][c]);
        for (auto& d : da) std::swap(d[i][pc], d[i][c]);
      }
      sign = -sign;
    }
    const Interval& piv = a[c][c];
    for (std::size_t k = 0; k < K; ++k) dP[k] = dP[k] * piv + P * da[k][c][c];
    P = P * piv;
    if (c + 1 == n) break;
    if (piv.contains_zero()) throw std::domain_error("det: pivot interval contains zero");
    Interval piv2 = sqr(piv);
    for (std::size_t r = c + 1; r < n; ++r) {
      Interval f = a[r][c] / piv;
      std::vector<Interval> df(K);
      for (std::size_t k = 0; k < K; ++k) df[k] = (da[k][r][c] * piv - a[r][c] * da[k][c][c]) / piv2;
      for (std::size_t j = c + 1; j < n; ++j) {
        for (std::size_t k = 0; k < K; ++k) da[k][r][j] -= df[k] * a[c][j] + f * da[k][c][j];
        a[r][j] -= f * a[c][j];
      }
    }
  }
  DetWithGradient out;
  out.det = sign > 0 ? P : -P;
  for (auto& d : dP) out.grad.push_back(sign > 0 ? d : -d);
  return out;
}

namespace {

// Laplace expansion along the first row: always a valid enclosure, used when
// elimination meets a pivot containing zero.
Interval cofactor_det(const IntervalMatrix& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Interval acc(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_thin() && a[0][j].contains_zero()) continue;
    IntervalMatrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Interval> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(std::move(row));
    }
    Interval t = a[0][j] * cofactor_det(minor);
    acc = j % 2 ? acc - t : acc + t;
  }
  return acc;
}

}  // namespace

Interval interval_det(const IntervalMatrix& a) {
  try {
    return det_with_gradient(a, {}).det;
  } catch (const std::domain_error&) {
    return cofactor_det(a);
  }
}

AugmentedSystem::AugmentedSystem(PolySystem sys, std::optional<Embedding> restriction)
    : sys_(std::move(sys)) {
  const std::size_t N = sys_.arity(), n = sys_.unknowns();
  restricted_ = restriction.has_value();
  emb_ = restriction ? *restriction : Embedding::identity(N);
  if (emb_.full_to_reduced.size() != N) throw std::invalid_argument("AugmentedSystem: embedding arity");
  for (const auto& e : sys_.equations)
    for (std::size_t v = 0; v < N; ++v) max_degree_ = std::max(max_degree_, e.degree_in(v));
  d1_.resize(n);
  d2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < N; ++l) d1_[i].push_back(sys_.equations[i].derivative(l));
    d2_[i].resize(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < N; ++l) d2_[i][j].push_back(d1_[i][j].derivative(l));
  }
}

std::string AugmentedSystem::id() const {
  std::string s = to_string(sys_.kind) + "/" + to_string(sys_.masses.pattern) + "/augmented";
  if (restricted_) s += "/fix:" + emb_.label;
  return s;
}

Box AugmentedSystem::residual(const Box& full) const {
  PowerTable<Interval> t(std::span<const Interval>(full), max_degree_);
  Box out;
  for (const auto& e : sys_.equations) out.push_back(e.evaluate(t, rational_to_interval));
  return out;
}

IntervalMatrix AugmentedSystem::dx(const Box& full) const {
  const std::size_t n = sys_.unknowns();
  PowerTable<Interval> t(std::span<const Interval>(full), max_degree_);
  IntervalMatrix a(n, std::vector<Interval>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = d1_[i][j].evaluate(t, rational_to_interval);
  return a;
}

Box AugmentedSystem::dm(const Box& full) const {
  PowerTable<Interval> t(std::span<const Interval>(full), max_degree_);
  Box out;
  for (std::size_t i = 0; i < sys_.unknowns(); ++i) out.push_back(d1_[i][sys_.parameter()].evaluate(t, rational_to_interval));
  return out;
}

Box AugmentedSystem::eval(const Box& y) const {
  Box full = emb_.embed(y);
  PowerTable<Interval> t(std::span<const Interval>(full), max_degree_);
  Box out;
  for (std::size_t i : emb_.equations) out.push_back(sys_.equations[i].evaluate(t, rational_to_interval));
  out.push_back(interval_det(dx(full)));
  return out;
}

IntervalMatrix AugmentedSystem::jacobian(const Box& y) const {
  const std::size_t n = sys_.unknowns(), N = sys_.arity(), K = emb_.reduced_dim;
  Box full = emb_.embed(y);
  PowerTable<Interval> t(std::span<const Interval>(full), max_degree_);
  IntervalMatrix J;
  for (std::size_t i : emb_.equations) {
    std::vector<Interval> row(K, Interval(0));
    for (std::size_t l = 0; l < N; ++l) row[emb_.full_to_reduced[l]] += d1_[i][l].evaluate(t, rational_to_interval);
    J.push_back(std::move(row));
  }
  IntervalMatrix a(n, std::vector<Interval>(n));
  std::vector<IntervalMatrix> da(K, IntervalMatrix(n, std::vector<Interval>(n, Interval(0))));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = d1_[i][j].evaluate(t, rational_to_interval);
      for (std::size_t l = 0; l < N; ++l) da[emb_.full_to_reduced[l]][i][j] += d2_[i][j][l].evaluate(t, rational_to_interval);
    }
  J.push_back(det_with_gradient(a, da).grad);
  return J;
}

FixedParameterSystem::FixedParameterSystem(PolySystem sys, mpq_class m) : sys_(std::move(sys)), m_(std::move(m)) {
  for (const auto& e : sys_.equations)
    for (std::size_t v = 0; v < sys_.arity(); ++v) max_degree_ = std::max(max_degree_, e.degree_in(v));
  d1_.resize(sys_.unknowns());
  for (std::size_t i = 0; i < sys_.unknowns(); ++i)
    for (std::size_t j = 0; j < sys_.unknowns(); ++j) d1_[i].push_back(sys_.equations[i].derivative(j));
}

std::string FixedParameterSystem::id() const {
  return to_string(sys_.kind) + "/" + to_string(sys_.masses.pattern) + "/m=" + m_.get_str();
}

Box FixedParameterSystem::full(const Box& y) const {
  if (y.size() != dim()) throw std::invalid_argument("FixedParameterSystem: dimension mismatch");
  Box f = y;
  f.push_back(Interval(m_));
  return f;
}

Box FixedParameterSystem::eval(const Box& y) const {
  Box f = full(y);
  PowerTable<Interval> t(std::span<const Interval>(f), max_degree_);
  Box out;
  for (const auto& e : sys_.equations) out.push_back(e.evaluate(t, rational_to_interval));
  return out;
}

IntervalMatrix FixedParameterSystem::jacobian(const Box& y) const {
  Box f = full(y);
  PowerTable<Interval> t(std::span<const Interval>(f), max_degree_);
  IntervalMatrix a(dim(), std::vector<Interval>(dim()));
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) a[i][j] = d1_[i][j].evaluate(t, rational_to_interval);
  return a;
}

}  // namespace ccbif
