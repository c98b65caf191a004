#include <cmath>

#include "catnet/error.hpp"
#include "catnet/train.hpp"

namespace catnet {

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "Adam" : "SGD"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "Adam") return OptimizerKind::Adam;
  if (name == "SGD") return OptimizerKind::SGD;
  throw DataError("unknown optimizer '" + std::string(name) + "'");
}

void Sgd::step(std::vector<Param>& params, const std::vector<Matrix>& grads) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].value -= lr_ * grads[i];
}

void Adam::step(std::vector<Param>& params, const std::vector<Matrix>& grads) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
    params[i].value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace catnet
