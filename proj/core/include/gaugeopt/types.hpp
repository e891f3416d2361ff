#pragma once

#include <Eigen/Dense>

namespace gaugeopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace gaugeopt
