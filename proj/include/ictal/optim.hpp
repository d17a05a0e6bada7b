#pragma once

#include <cmath>
#include <stdexcept>

#include "ictal/nn/model.hpp"
#include "ictal/types.hpp"

namespace ictal {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("adam: learning_rate must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("adam: betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("adam: epsilon must be positive");
    }
  }
};

// First and second moment accumulators, shaped exactly like the model.
template <typename Scalar>
struct OptimizerState {
  ModelParams<Scalar> m;
  ModelParams<Scalar> v;
  long step = 0;

  static OptimizerState like(const ModelParams<Scalar>& p) {
    OptimizerState s;
    s.m = ModelParams<Scalar>::zeros(p.units(), p.input_size(),
                                     p.dense_units(), p.classes());
    s.v = ModelParams<Scalar>::zeros(p.units(), p.input_size(),
                                     p.dense_units(), p.classes());
    return s;
  }
};

namespace detail {

template <typename Scalar>
void check_same_shapes(const ModelParams<Scalar>& a,
                       const ModelParams<Scalar>& b, const char* what) {
  const auto ta = tensor_list(a);
  const auto tb = tensor_list(b);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k].size != tb[k].size) {
      throw ShapeError(std::string(what) + ": tensor size mismatch at " +
                       ta[k].name);
    }
  }
}

}  // namespace detail

// Plain gradient descent: theta <- theta - lr * g.
template <typename Scalar>
void sgd_step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grads,
              double learning_rate) {
  detail::check_same_shapes(params, grads, "sgd_step");
  auto tp = tensor_list(params);
  const auto tg = tensor_list(grads);
  for (std::size_t k = 0; k < tp.size(); ++k) {
    Eigen::Map<Vector<Scalar>> p(tp[k].data, tp[k].size);
    Eigen::Map<const Vector<Scalar>> g(tg[k].data, tg[k].size);
    p -= static_cast<Scalar>(learning_rate) * g;
  }
}

// Bias-corrected Adam update (Kingma & Ba).
template <typename Scalar>
void adam_step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grads,
               const AdamConfig& config, OptimizerState<Scalar>& state) {
  config.validate();
  detail::check_same_shapes(params, grads, "adam_step");
  detail::check_same_shapes(params, state.m, "adam_step");

  state.step += 1;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 =
      1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 =
      1.0 - std::pow(b2, static_cast<double>(state.step));

  auto tp = tensor_list(params);
  const auto tg = tensor_list(grads);
  auto tm = tensor_list(state.m);
  auto tv = tensor_list(state.v);
  for (std::size_t k = 0; k < tp.size(); ++k) {
    Eigen::Map<Vector<Scalar>> p(tp[k].data, tp[k].size);
    Eigen::Map<const Vector<Scalar>> g(tg[k].data, tg[k].size);
    Eigen::Map<Vector<Scalar>> m(tm[k].data, tm[k].size);
    Eigen::Map<Vector<Scalar>> v(tv[k].data, tv[k].size);

    m = static_cast<Scalar>(b1) * m + static_cast<Scalar>(1.0 - b1) * g;
    v = (static_cast<Scalar>(b2) * v.array() +
         static_cast<Scalar>(1.0 - b2) * g.array().square())
            .matrix();
    p -= (static_cast<Scalar>(config.learning_rate) *
          (m.array() / static_cast<Scalar>(correction1)) /
          ((v.array() / static_cast<Scalar>(correction2)).sqrt() +
           static_cast<Scalar>(config.epsilon)))
             .matrix();
  }
}

}  // namespace ictal
