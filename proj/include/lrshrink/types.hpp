#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lrshrink {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Labels = std::vector<std::string>;

/// Absolute tolerance for unit-sum (compositions) and zero-sum (CLR rows).
inline constexpr double kSumTolerance = 1e-9;

}  // namespace lrshrink
