#pragma once

#include <vector>

#include <Eigen/Dense>

namespace impzone {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using PointList = std::vector<Vector>;

}  // namespace impzone
