#include "jrp/linalg.hpp"

namespace jrp {

std::optional<Eigen::VectorXd> null_vector(const Eigen::MatrixXd& a, double rank_tol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return std::nullopt;
  Eigen::MatrixXd scaled = a;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    double m = scaled.row(r).cwiseAbs().maxCoeff();
    if (m > 0.0) scaled.row(r) /= m;
  }
  Eigen::VectorXd v;
  if (scaled.rows() == 0) {
    v = Eigen::VectorXd::Unit(n, 0);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
    lu.setThreshold(rank_tol);
    if (lu.dimensionOfKernel() == 0) return std::nullopt;
    v = lu.kernel().col(0);
  }
  double norm = v.cwiseAbs().maxCoeff();
  if (norm <= 0.0) return std::nullopt;
  v /= norm;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v[i]) < 1e-12) v[i] = 0.0;
  }
  if (scaled.rows() > 0 && (scaled * v).cwiseAbs().maxCoeff() > 1e-8) return std::nullopt;
  return v;
}

}  // namespace jrp
