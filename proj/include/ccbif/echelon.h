#pragma once

#include <vector>

#include "ccbif/interval.h"

namespace ccbif {

// Row echelon form of an interval matrix by Gaussian elimination with
// partial row pivoting on midpoint magnitude (ties: lowest row). A column
// whose best pivot candidate contains 0 is skipped and reported as free.
struct EchelonForm {
  IntervalMatrix u;
  std::vector<std::size_t> row_order;   // original row of each echelon row
  std::vector<std::size_t> pivot_cols;  // one per certified pivot row
  std::vector<std::size_t> free_cols;
  std::size_t rank_lower_bound = 0;
  // True when fewer than n−1 pivots were certified.
  bool flagged = false;

  // With det A = 0 known independently, rank ≥ n−1 pins the nullity at 1.
  bool nullity_one(bool det_zero_known) const {
    return det_zero_known && rank_lower_bound + 1 == u.size();
  }
};

EchelonForm interval_gauss_echelon(const IntervalMatrix& a);

IntervalMatrix transpose(const IntervalMatrix& a);

struct KernelVector {
  Box v;
  std::size_t normalized = 0;  // component set to exactly 1
};

// Null vector of A from its echelon form: the free variable is exactly 1 and
// the pivot variables follow by back-substitution. Requires one free column.
KernelVector kernel_vector(const EchelonForm& e);

// A·v over intervals.
Box multiply(const IntervalMatrix& a, const Box& v);

}  // namespace ccbif
