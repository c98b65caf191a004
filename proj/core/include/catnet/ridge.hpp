#pragma once

#include "catnet/linalg.hpp"

namespace catnet {

struct RidgeModel {
  Vector coef;
  double intercept = 0.0;
};

// Closed-form ridge via the normal equations (X'X + lambda I) b = X'y. With
// an intercept the columns and target are centered first and the intercept
// is not penalized. Throws NumericalError when lambda = 0 and X'X is singular.
RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda, bool fit_intercept = true);
Vector predict(const RidgeModel& model, const Matrix& x);

}  // namespace catnet
