#pragma once

#include <optional>

#include <Eigen/Dense>

namespace jrp {

// A nonzero v with a·v = 0, scaled to unit infinity norm with entries below
// 1e-12 zeroed, or nullopt if a has full column rank. Rows are scaled to unit
// infinity norm before the rank decision.
std::optional<Eigen::VectorXd> null_vector(const Eigen::MatrixXd& a, double rank_tol = 1e-10);

}  // namespace jrp
