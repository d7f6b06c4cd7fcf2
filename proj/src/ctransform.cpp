#include "otl/ctransform.hpp"

namespace otl {

PotentialVector c_transform(const PotentialVector& f, const CostMatrix& c, std::vector<int>* argmin) {
  require(f.size() == c.rows(), "potential length does not match cost rows");
  require(f.allFinite(), "potential has non-finite entries");
  const Eigen::Index n = c.rows(), m = c.cols();
  PotentialVector out(m);
  if (argmin) argmin->assign(static_cast<std::size_t>(m), 0);
  for (Eigen::Index j = 0; j < m; ++j) {
    double best = c(0, j) - f[0];
    int at = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      const double v = c(i, j) - f[i];
      if (v < best) {
        best = v;
        at = static_cast<int>(i);
      }
    }
    out[j] = best;
    if (argmin) (*argmin)[static_cast<std::size_t>(j)] = at;
  }
  return out;
}

PotentialVector c_transform_rows(const PotentialVector& g, const CostMatrix& c, std::vector<int>* argmin) {
  return c_transform(g, c.transposed(), argmin);
}

PotentialVector double_c_transform(const PotentialVector& f, const CostMatrix& c) {
  return c_transform_rows(c_transform(f, c), c);
}

DualPair tighten(const DualPair& pair, const CostMatrix& c) {
  require(pair.psi.size() == c.cols(), "potential length does not match cost columns");
  DualPair out;
  out.psi = c_transform(pair.phi, c);
  out.phi = c_transform_rows(out.psi, c);
  return out;
}

}  // namespace otl
