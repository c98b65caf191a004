#include "catnet/ridge.hpp"

#include <Eigen/Dense>

#include "catnet/error.hpp"

namespace catnet {

RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda, bool fit_intercept) {
  if (x.rows() != y.size()) throw DataError("ridge: design and target row counts differ");
  if (x.rows() == 0) throw DataError("ridge: no rows");
  if (lambda < 0.0) throw DataError("ridge: lambda must be non-negative");
  Eigen::RowVectorXd x_mean = Eigen::RowVectorXd::Zero(x.cols());
  double y_mean = 0.0;
  if (fit_intercept) {
    x_mean = x.colwise().mean();
    y_mean = y.mean();
  }
  const Matrix xc = x.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = xc.transpose() * yc;

  RidgeModel m;
  if (lambda > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericalError("ridge normal equations are not positive definite");
    m.coef = llt.solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    qr.setThreshold(1e-12);
    if (qr.rank() < gram.cols()) {
      throw NumericalError("ridge normal equations are singular with lambda = 0; use lambda > 0");
    }
    m.coef = qr.solve(rhs);
  }
  m.intercept = y_mean - x_mean.dot(m.coef);
  return m;
}

Vector predict(const RidgeModel& model, const Matrix& x) {
  if (x.cols() != model.coef.size()) throw DataError("ridge: feature width mismatch");
  Vector out = x * model.coef;
  out.array() += model.intercept;
  return out;
}

}  // namespace catnet
