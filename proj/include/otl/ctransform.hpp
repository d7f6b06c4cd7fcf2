#pragma once

// c-transforms on finite supports.
//   (f^c)_j    = min_i c_ij - f_i
//   (f^cc)_i   = min_j c_ij - (f^c)_j

#include <vector>

#include "otl/measures.hpp"
#include "otl/transport.hpp"

namespace otl {

using PotentialVector = Vector;

/// f over the row support -> f^c over the column support. With `argmin`
/// set, receives the minimizing row for each column (lowest index on ties).
PotentialVector c_transform(const PotentialVector& f, const CostMatrix& c, std::vector<int>* argmin = nullptr);

/// Transform of a column potential g back to the rows: min_j c_ij - g_j.
PotentialVector c_transform_rows(const PotentialVector& g, const CostMatrix& c, std::vector<int>* argmin = nullptr);

PotentialVector double_c_transform(const PotentialVector& f, const CostMatrix& c);

/// psi <- phi^c, then phi <- psi^c. The result is feasible and, for
/// nonnegative weights, its dual objective is no smaller than the input's
/// whenever the input was feasible.
DualPair tighten(const DualPair& pair, const CostMatrix& c);

}  // namespace otl
