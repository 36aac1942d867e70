#pragma once

#include <Eigen/Dense>

namespace sgbl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace sgbl
