#pragma once

#include <Eigen/Dense>

namespace elm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace elm
