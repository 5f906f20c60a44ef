#pragma once

#include <Eigen/Dense>
#include <functional>

namespace erem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Scalar field of position; 1D callers pass y = 0.
using SpaceFn = std::function<double(double x, double y)>;

/// Scalar field of position and time.
using SpaceTimeFn = std::function<double(double x, double y, double t)>;

enum class MassMode { lumped, consistent };
enum class BcType { dirichlet, neumann, robin };
enum class Scheme { erem, exp_euler };

} // namespace erem
