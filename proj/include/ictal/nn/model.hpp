#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ictal/errors.hpp"
#include "ictal/nn/layers.hpp"
#include "ictal/nn/lstm.hpp"
#include "ictal/types.hpp"

namespace ictal {

// The full classifier: peephole LSTM over the segment sequence, a
// time-distributed dense layer, temporal average pooling, and a softmax
// readout of the pooled feature.
template <typename Scalar>
struct ModelParams {
  LstmParams<Scalar> lstm;
  DenseParams<Scalar> dense;
  SoftmaxParams<Scalar> softmax;

  Index units() const { return lstm.units(); }
  Index input_size() const { return lstm.input_size(); }
  Index dense_units() const { return dense.out_units(); }
  Index classes() const { return softmax.classes(); }

  static ModelParams zeros(Index units, Index input_size, Index dense_units,
                           Index classes) {
    ModelParams p;
    p.lstm = LstmParams<Scalar>::zeros(units, input_size);
    p.dense = DenseParams<Scalar>::zeros(dense_units, units);
    p.softmax = SoftmaxParams<Scalar>::zeros(classes, dense_units);
    return p;
  }

  void check_consistent() const {
    lstm.check_consistent();
    if (dense.in_units() != lstm.units()) {
      throw ShapeError("model: dense input width must equal lstm units");
    }
    if (dense.b.size() != dense.out_units()) {
      throw ShapeError("model: dense bias length mismatch");
    }
    if (softmax.features() != dense.out_units()) {
      throw ShapeError("model: softmax feature width must equal dense units");
    }
    if (softmax.c.size() != softmax.classes()) {
      throw ShapeError("model: softmax bias length mismatch");
    }
  }
};

// Flat view of every learnable tensor, in the fixed serialization order
// shared by the optimizer, the gradient checker and the checkpoint format.
template <typename Scalar>
struct TensorRef {
  const char* name;
  Scalar* data;
  Index size;
};

template <typename Scalar>
std::vector<TensorRef<Scalar>> tensor_list(ModelParams<Scalar>& p) {
  return {
      {"lstm.Wz", p.lstm.Wz.data(), p.lstm.Wz.size()},
      {"lstm.Wi", p.lstm.Wi.data(), p.lstm.Wi.size()},
      {"lstm.Wf", p.lstm.Wf.data(), p.lstm.Wf.size()},
      {"lstm.Wo", p.lstm.Wo.data(), p.lstm.Wo.size()},
      {"lstm.Rz", p.lstm.Rz.data(), p.lstm.Rz.size()},
      {"lstm.Ri", p.lstm.Ri.data(), p.lstm.Ri.size()},
      {"lstm.Rf", p.lstm.Rf.data(), p.lstm.Rf.size()},
      {"lstm.Ro", p.lstm.Ro.data(), p.lstm.Ro.size()},
      {"lstm.Pi", p.lstm.Pi.data(), p.lstm.Pi.size()},
      {"lstm.Pf", p.lstm.Pf.data(), p.lstm.Pf.size()},
      {"lstm.Po", p.lstm.Po.data(), p.lstm.Po.size()},
      {"lstm.bz", p.lstm.bz.data(), p.lstm.bz.size()},
      {"lstm.bi", p.lstm.bi.data(), p.lstm.bi.size()},
      {"lstm.bf", p.lstm.bf.data(), p.lstm.bf.size()},
      {"lstm.bo", p.lstm.bo.data(), p.lstm.bo.size()},
      {"dense.W", p.dense.W.data(), p.dense.W.size()},
      {"dense.b", p.dense.b.data(), p.dense.b.size()},
      {"softmax.theta", p.softmax.theta.data(), p.softmax.theta.size()},
      {"softmax.c", p.softmax.c.data(), p.softmax.c.size()},
  };
}

template <typename Scalar>
std::vector<TensorRef<const Scalar>> tensor_list(const ModelParams<Scalar>& p) {
  auto refs = tensor_list(const_cast<ModelParams<Scalar>&>(p));
  std::vector<TensorRef<const Scalar>> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    out.push_back({r.name, r.data, r.size});
  }
  return out;
}

template <typename Scalar>
Index parameter_count(const ModelParams<Scalar>& p) {
  Index total = 0;
  for (const auto& t : tensor_list(p)) {
    total += t.size;
  }
  return total;
}

template <typename Scalar>
struct ForwardTrace {
  LstmTrace<Scalar> lstm;
  DenseTrace<Scalar> dense;
  Vector<Scalar> pooled;     // averaged dense features
  Vector<Scalar> logits;
  Vector<Scalar> posterior;  // sums to 1
};

// `segments` is M x L with one timestep per row, as produced by segment().
template <typename Scalar>
ForwardTrace<Scalar> model_forward(const ModelParams<Scalar>& p,
                                   const Matrix<Scalar>& segments) {
  if (segments.cols() != p.input_size()) {
    throw ShapeError("model_forward: segment length does not match model "
                     "input size");
  }
  if (segments.rows() < 1) {
    throw std::invalid_argument("model_forward: empty segment sequence");
  }
  ForwardTrace<Scalar> tr;
  tr.lstm = lstm_forward<Scalar>(p.lstm, segments.transpose());
  tr.dense = dense_forward<Scalar>(p.dense, tr.lstm.u);
  tr.pooled = average_pool<Scalar>(tr.dense.v);
  tr.logits = p.softmax.theta * tr.pooled + p.softmax.c;
  tr.posterior = softmax_from_logits(tr.logits);
  return tr;
}

template <typename Scalar>
Scalar loss_from_trace(const ForwardTrace<Scalar>& tr, int label) {
  if (label < 0 || label >= tr.posterior.size()) {
    throw std::invalid_argument("loss_from_trace: label out of range");
  }
  return -std::log(std::max(tr.posterior[label],
                            static_cast<Scalar>(kProbabilityFloor)));
}

// Backpropagation through time for one example. Returns the gradient of
// -log P(label) with respect to every parameter. The cell-state path
// collects four upstream contributions at each step: the block output via
// tanh(c), the output-gate peephole at the same step, and the forget-gate
// cell carry plus the input/forget peepholes from the step after.
template <typename Scalar>
ModelParams<Scalar> model_backward(const ModelParams<Scalar>& p,
                                   const ForwardTrace<Scalar>& tr,
                                   int label) {
  const Index b = p.units();
  const Index m = tr.lstm.steps();
  if (tr.lstm.u.rows() != b || tr.dense.v.rows() != p.dense_units() ||
      tr.posterior.size() != p.classes()) {
    throw ShapeError("model_backward: trace does not match parameters");
  }
  if (label < 0 || label >= p.classes()) {
    throw std::invalid_argument("model_backward: label out of range");
  }

  ModelParams<Scalar> g = ModelParams<Scalar>::zeros(
      b, p.input_size(), p.dense_units(), p.classes());

  // Softmax head: d(loss)/d(logits) = posterior - onehot(label).
  Vector<Scalar> dlogits = tr.posterior;
  dlogits[label] -= Scalar(1);
  g.softmax.theta = dlogits * tr.pooled.transpose();
  g.softmax.c = dlogits;

  // Pooling spreads the feature gradient uniformly over the timesteps.
  const Vector<Scalar> dpooled = p.softmax.theta.transpose() * dlogits;
  const Vector<Scalar> dv_col = dpooled / static_cast<Scalar>(m);

  // Time-distributed dense.
  Matrix<Scalar> dvbar(p.dense_units(), m);
  for (Index t = 0; t < m; ++t) {
    dvbar.col(t) = dv_col.array() *
                   tr.dense.v.col(t).array().unaryExpr(
                       [](Scalar v) { return tanh_grad(v); });
  }
  g.dense.W = dvbar * tr.lstm.u.transpose();
  g.dense.b = dvbar.rowwise().sum();
  const Matrix<Scalar> du_dense = p.dense.W.transpose() * dvbar;

  // BPTT over the gates; columns are filled right to left.
  Matrix<Scalar> dzbar(b, m), dibar(b, m), dfbar(b, m), dobar(b, m);
  Vector<Scalar> dc_next = Vector<Scalar>::Zero(b);
  Vector<Scalar> f_next = Vector<Scalar>::Zero(b);

  for (Index t = m - 1; t >= 0; --t) {
    Vector<Scalar> du = du_dense.col(t);
    if (t + 1 < m) {
      du += p.lstm.Rz.transpose() * dzbar.col(t + 1) +
            p.lstm.Ri.transpose() * dibar.col(t + 1) +
            p.lstm.Rf.transpose() * dfbar.col(t + 1) +
            p.lstm.Ro.transpose() * dobar.col(t + 1);
    }

    const auto c_t = tr.lstm.c.col(t);
    const Vector<Scalar> tanh_c =
        c_t.unaryExpr([](Scalar v) { return tanh_act(v); });

    dobar.col(t) = du.array() * tanh_c.array() *
                   tr.lstm.o.col(t).array().unaryExpr(
                       [](Scalar v) { return sigmoid_grad(v); });

    Vector<Scalar> dc =
        (du.array() * tr.lstm.o.col(t).array() *
         tanh_c.array().unaryExpr([](Scalar v) { return tanh_grad(v); }))
            .matrix();
    dc += (p.lstm.Po.array() * dobar.col(t).array()).matrix();
    if (t + 1 < m) {
      dc += (dc_next.array() * f_next.array()).matrix();
      dc += (p.lstm.Pi.array() * dibar.col(t + 1).array()).matrix();
      dc += (p.lstm.Pf.array() * dfbar.col(t + 1).array()).matrix();
    }

    // c_prev is zero at the first step, which zeroes the forget-gate and
    // peephole contributions there.
    if (t > 0) {
      const auto c_prev = tr.lstm.c.col(t - 1);
      dfbar.col(t) = dc.array() * c_prev.array() *
                     tr.lstm.f.col(t).array().unaryExpr(
                         [](Scalar v) { return sigmoid_grad(v); });
    } else {
      dfbar.col(t).setZero();
    }
    dibar.col(t) = dc.array() * tr.lstm.z.col(t).array() *
                   tr.lstm.i.col(t).array().unaryExpr(
                       [](Scalar v) { return sigmoid_grad(v); });
    dzbar.col(t) = dc.array() * tr.lstm.i.col(t).array() *
                   tr.lstm.z.col(t).array().unaryExpr(
                       [](Scalar v) { return tanh_grad(v); });

    dc_next = dc;
    f_next = tr.lstm.f.col(t);
  }

  // Weight gradients as whole-sequence products. The recurrent and
  // peephole terms pair step t with state t-1, so the first column drops
  // out of those sums.
  g.lstm.Wz = dzbar * tr.lstm.x.transpose();
  g.lstm.Wi = dibar * tr.lstm.x.transpose();
  g.lstm.Wf = dfbar * tr.lstm.x.transpose();
  g.lstm.Wo = dobar * tr.lstm.x.transpose();
  if (m > 1) {
    const auto y_prev = tr.lstm.u.leftCols(m - 1);
    g.lstm.Rz = dzbar.rightCols(m - 1) * y_prev.transpose();
    g.lstm.Ri = dibar.rightCols(m - 1) * y_prev.transpose();
    g.lstm.Rf = dfbar.rightCols(m - 1) * y_prev.transpose();
    g.lstm.Ro = dobar.rightCols(m - 1) * y_prev.transpose();
    const auto c_prev = tr.lstm.c.leftCols(m - 1);
    g.lstm.Pi =
        (dibar.rightCols(m - 1).array() * c_prev.array()).rowwise().sum();
    g.lstm.Pf =
        (dfbar.rightCols(m - 1).array() * c_prev.array()).rowwise().sum();
  }
  g.lstm.Po = (dobar.array() * tr.lstm.c.array()).rowwise().sum();
  g.lstm.bz = dzbar.rowwise().sum();
  g.lstm.bi = dibar.rowwise().sum();
  g.lstm.bf = dfbar.rowwise().sum();
  g.lstm.bo = dobar.rowwise().sum();
  return g;
}

// Argmax of the posterior; ties break toward the lowest class index.
template <typename Scalar>
int predict_from_posterior(const Vector<Scalar>& posterior) {
  int best = 0;
  for (Index k = 1; k < posterior.size(); ++k) {
    if (posterior[k] > posterior[best]) {
      best = static_cast<int>(k);
    }
  }
  return best;
}

template <typename Scalar>
int predict(const ModelParams<Scalar>& p, const Matrix<Scalar>& segments) {
  return predict_from_posterior(model_forward(p, segments).posterior);
}

}  // namespace ictal
