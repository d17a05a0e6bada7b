#pragma once

#include <cmath>

namespace ictal {

// Logistic sigmoid. Never evaluates exp of a positive argument, so it is
// finite and accurate over the whole double range.
template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
  }
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar tanh_act(Scalar x) {
  return std::tanh(x);
}

// Derivatives expressed through the stored activation values.
template <typename Scalar>
Scalar sigmoid_grad(Scalar s) {
  return s * (Scalar(1) - s);
}

template <typename Scalar>
Scalar tanh_grad(Scalar t) {
  return Scalar(1) - t * t;
}

}  // namespace ictal
