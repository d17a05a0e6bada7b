#pragma once

#include <cmath>

#include "ictal/nn/model.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace detail {

// Scaled uniform U(-r, r) with r = sqrt(6 / (fan_in + fan_out)), filled in
// storage order so a fixed seed reproduces the exact coefficients.
template <typename Scalar>
void glorot_fill(Matrix<Scalar>& w, Index fan_in, Index fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index k = 0; k < w.size(); ++k) {
    w.data()[k] = static_cast<Scalar>(rng.uniform(-r, r));
  }
}

template <typename Scalar>
void glorot_fill(Vector<Scalar>& w, Index fan_in, Index fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index k = 0; k < w.size(); ++k) {
    w[k] = static_cast<Scalar>(rng.uniform(-r, r));
  }
}

}  // namespace detail

// Weights are Glorot-uniform, biases zero except the forget-gate bias at
// +1 so early training does not forget across long sequences. Peephole
// vectors use the recurrent fan (units in, units out). Tensors are drawn
// in tensor_list order.
template <typename Scalar>
ModelParams<Scalar> init_params(Index units, Index input_size,
                                Index dense_units, Index classes, Rng& rng) {
  ModelParams<Scalar> p =
      ModelParams<Scalar>::zeros(units, input_size, dense_units, classes);
  detail::glorot_fill(p.lstm.Wz, input_size, units, rng);
  detail::glorot_fill(p.lstm.Wi, input_size, units, rng);
  detail::glorot_fill(p.lstm.Wf, input_size, units, rng);
  detail::glorot_fill(p.lstm.Wo, input_size, units, rng);
  detail::glorot_fill(p.lstm.Rz, units, units, rng);
  detail::glorot_fill(p.lstm.Ri, units, units, rng);
  detail::glorot_fill(p.lstm.Rf, units, units, rng);
  detail::glorot_fill(p.lstm.Ro, units, units, rng);
  detail::glorot_fill(p.lstm.Pi, units, units, rng);
  detail::glorot_fill(p.lstm.Pf, units, units, rng);
  detail::glorot_fill(p.lstm.Po, units, units, rng);
  p.lstm.bf.setConstant(Scalar(1));
  detail::glorot_fill(p.dense.W, units, dense_units, rng);
  detail::glorot_fill(p.softmax.theta, dense_units, classes, rng);
  return p;
}

}  // namespace ictal
