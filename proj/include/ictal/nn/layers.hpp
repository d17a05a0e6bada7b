#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ictal/errors.hpp"
#include "ictal/nn/activations.hpp"
#include "ictal/types.hpp"

namespace ictal {

// Probabilities are clamped at this floor before any log is taken.
inline constexpr double kProbabilityFloor = 1e-30;

template <typename Scalar>
struct DenseParams {
  Matrix<Scalar> W;  // out_units x in_units
  Vector<Scalar> b;  // out_units

  Index out_units() const { return W.rows(); }
  Index in_units() const { return W.cols(); }

  static DenseParams zeros(Index out, Index in) {
    return DenseParams{Matrix<Scalar>::Zero(out, in),
                       Vector<Scalar>::Zero(out)};
  }
};

template <typename Scalar>
struct DenseTrace {
  Matrix<Scalar> vbar;  // pre-activations, out_units x M
  Matrix<Scalar> v;     // tanh(vbar)
};

// Time-distributed dense layer: the same affine map plus tanh applied to
// every timestep column independently.
template <typename Scalar>
DenseTrace<Scalar> dense_forward(const DenseParams<Scalar>& p,
                                 const Matrix<Scalar>& u) {
  if (u.rows() != p.in_units()) {
    throw ShapeError("dense_forward: input rows do not match in_units");
  }
  DenseTrace<Scalar> tr;
  tr.vbar = (p.W * u).colwise() + p.b;
  tr.v = tr.vbar.unaryExpr([](Scalar x) { return tanh_act(x); });
  return tr;
}

// Temporal average pooling: the mean over timestep columns, so every
// segment contributes equally to the pooled feature.
template <typename Scalar>
Vector<Scalar> average_pool(const Matrix<Scalar>& v) {
  if (v.cols() < 1) {
    throw std::invalid_argument("average_pool: need at least one timestep");
  }
  return v.rowwise().mean();
}

template <typename Scalar>
struct SoftmaxParams {
  Matrix<Scalar> theta;  // classes x features, row k scores class k
  Vector<Scalar> c;      // class bias; zero recovers the plain hypothesis

  Index classes() const { return theta.rows(); }
  Index features() const { return theta.cols(); }

  static SoftmaxParams zeros(Index classes, Index features) {
    return SoftmaxParams{Matrix<Scalar>::Zero(classes, features),
                         Vector<Scalar>::Zero(classes)};
  }
};

// Max-shifted softmax; the shift leaves the distribution unchanged but
// keeps every exponent non-positive.
template <typename Scalar>
Vector<Scalar> softmax_from_logits(const Vector<Scalar>& logits) {
  const Scalar shift = logits.maxCoeff();
  Vector<Scalar> p =
      (logits.array() - shift).exp().matrix();
  return p / p.sum();
}

template <typename Scalar>
Vector<Scalar> softmax_hypothesis(const SoftmaxParams<Scalar>& p,
                                  const Vector<Scalar>& features) {
  if (features.size() != p.features()) {
    throw ShapeError("softmax_hypothesis: feature length mismatch");
  }
  const Vector<Scalar> logits = p.theta * features + p.c;
  return softmax_from_logits(logits);
}

// Mean over the batch of -log P(true class). `posteriors` holds one example
// per row.
template <typename Scalar>
Scalar cross_entropy(const Matrix<Scalar>& posteriors,
                     const std::vector<int>& labels) {
  if (static_cast<Index>(labels.size()) != posteriors.rows()) {
    throw ShapeError("cross_entropy: one label per posterior row required");
  }
  Scalar total = 0;
  for (Index n = 0; n < posteriors.rows(); ++n) {
    const int y = labels[static_cast<std::size_t>(n)];
    if (y < 0 || y >= posteriors.cols()) {
      throw std::invalid_argument("cross_entropy: label out of range");
    }
    const Scalar p =
        std::max(posteriors(n, y), static_cast<Scalar>(kProbabilityFloor));
    total -= std::log(p);
  }
  return total / static_cast<Scalar>(posteriors.rows());
}

}  // namespace ictal
