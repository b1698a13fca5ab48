#include "ccbif/echelon.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ccbif {

EchelonForm interval_gauss_echelon(const IntervalMatrix& a) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("interval_gauss_echelon: matrix must be square");
  EchelonForm e;
  e.u = a;
  e.row_order.resize(n);
  std::iota(e.row_order.begin(), e.row_order.end(), 0);
  std::size_t r = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (r == n) {
      e.free_cols.push_back(c);
      continue;
    }
    std::size_t best = r;
    double mag = -1;
    for (std::size_t i = r; i < n; ++i) {
      double v = std::abs(e.u[i][c].mid_d());
      if (v > mag) mag = v, best = i;
    }
    if (e.u[best][c].contains_zero()) {
      e.free_cols.push_back(c);
      continue;
    }
    std::swap(e.u[best], e.u[r]);
    std::swap(e.row_order[best], e.row_order[r]);
    const Interval& piv = e.u[r][c];
    for (std::size_t i = r + 1; i < n; ++i) {
      Interval f = e.u[i][c] / piv;
      e.u[i][c] = Interval(0);
      for (std::size_t j = c + 1; j < n; ++j) e.u[i][j] -= f * e.u[r][j];
    }
    e.pivot_cols.push_back(c);
    ++r;
  }
  e.rank_lower_bound = r;
  e.flagged = r + 1 < n;
  return e;
}

IntervalMatrix transpose(const IntervalMatrix& a) {
  IntervalMatrix t(a.empty() ? 0 : a[0].size(), std::vector<Interval>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

KernelVector kernel_vector(const EchelonForm& e) {
  const std::size_t n = e.u.size();
  if (e.free_cols.size() != 1)
    throw std::domain_error("kernel_vector: expected exactly one free column, found " +
                            std::to_string(e.free_cols.size()));
  KernelVector k;
  k.normalized = e.free_cols.front();
  k.v.assign(n, Interval(0));
  k.v[k.normalized] = Interval(1);
  for (std::size_t p = e.pivot_cols.size(); p-- > 0;) {
    std::size_t c = e.pivot_cols[p];
    Interval acc(0);
    for (std::size_t j = c + 1; j < n; ++j) acc += e.u[p][j] * k.v[j];
    k.v[c] = -acc / e.u[p][c];
  }
  return k;
}

Box multiply(const IntervalMatrix& a, const Box& v) {
  Box out;
  for (const auto& row : a) {
    Interval acc(0);
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
    out.push_back(acc);
  }
  return out;
}

}  // namespace ccbif
