#pragma once

#include "ictal/errors.hpp"
#include "ictal/nn/activations.hpp"
#include "ictal/types.hpp"

namespace ictal {

// Peephole LSTM parameters. The input and forget gates read the previous
// cell state through Pi/Pf; the output gate reads the fresh cell state
// through Po. All four gates also see the input and the recurrent block
// output.
template <typename Scalar>
struct LstmParams {
  Matrix<Scalar> Wz, Wi, Wf, Wo;  // units x input_size
  Matrix<Scalar> Rz, Ri, Rf, Ro;  // units x units
  Vector<Scalar> Pi, Pf, Po;      // units
  Vector<Scalar> bz, bi, bf, bo;  // units

  Index units() const { return Wz.rows(); }
  Index input_size() const { return Wz.cols(); }

  static LstmParams zeros(Index units, Index input_size) {
    LstmParams p;
    for (auto* w : {&p.Wz, &p.Wi, &p.Wf, &p.Wo}) {
      *w = Matrix<Scalar>::Zero(units, input_size);
    }
    for (auto* r : {&p.Rz, &p.Ri, &p.Rf, &p.Ro}) {
      *r = Matrix<Scalar>::Zero(units, units);
    }
    for (auto* v : {&p.Pi, &p.Pf, &p.Po, &p.bz, &p.bi, &p.bf, &p.bo}) {
      *v = Vector<Scalar>::Zero(units);
    }
    return p;
  }

  void check_consistent() const {
    const Index b = units();
    const Index l = input_size();
    for (const auto* w : {&Wi, &Wf, &Wo}) {
      if (w->rows() != b || w->cols() != l) {
        throw ShapeError("lstm: input weight shape mismatch");
      }
    }
    for (const auto* r : {&Rz, &Ri, &Rf, &Ro}) {
      if (r->rows() != b || r->cols() != b) {
        throw ShapeError("lstm: recurrent weight shape mismatch");
      }
    }
    for (const auto* v : {&Pi, &Pf, &Po, &bz, &bi, &bf, &bo}) {
      if (v->size() != b) {
        throw ShapeError("lstm: peephole/bias length mismatch");
      }
    }
  }
};

// Everything one step computes, stored exactly as computed: pre-activations
// (zbar, ibar, fbar, obar), activations (z, i, f, o), the cell c, block
// output u, and the consumed input x.
template <typename Scalar>
struct LstmStepCache {
  Vector<Scalar> x;
  Vector<Scalar> zbar, z;
  Vector<Scalar> ibar, i;
  Vector<Scalar> fbar, f;
  Vector<Scalar> c;
  Vector<Scalar> obar, o;
  Vector<Scalar> u;
};

template <typename Scalar>
LstmStepCache<Scalar> lstm_step(const LstmParams<Scalar>& p,
                                const Vector<Scalar>& x_t,
                                const Vector<Scalar>& y_prev,
                                const Vector<Scalar>& c_prev) {
  if (x_t.size() != p.input_size()) {
    throw ShapeError("lstm_step: input length does not match input_size");
  }
  if (y_prev.size() != p.units() || c_prev.size() != p.units()) {
    throw ShapeError("lstm_step: state length does not match units");
  }
  const auto sig = [](Scalar v) { return sigmoid(v); };
  const auto tnh = [](Scalar v) { return tanh_act(v); };

  LstmStepCache<Scalar> s;
  s.x = x_t;
  s.zbar = p.Wz * x_t + p.Rz * y_prev + p.bz;
  s.z = s.zbar.unaryExpr(tnh);
  s.ibar = p.Wi * x_t + p.Ri * y_prev +
           (p.Pi.array() * c_prev.array()).matrix() + p.bi;
  s.i = s.ibar.unaryExpr(sig);
  s.fbar = p.Wf * x_t + p.Rf * y_prev +
           (p.Pf.array() * c_prev.array()).matrix() + p.bf;
  s.f = s.fbar.unaryExpr(sig);
  s.c = (s.z.array() * s.i.array() + c_prev.array() * s.f.array()).matrix();
  s.obar = p.Wo * x_t + p.Ro * y_prev +
           (p.Po.array() * s.c.array()).matrix() + p.bo;
  s.o = s.obar.unaryExpr(sig);
  s.u = (s.c.unaryExpr(tnh).array() * s.o.array()).matrix();
  return s;
}

// Full unrolled sequence. One column per timestep; x is input_size x M and
// the gate/state matrices are units x M.
template <typename Scalar>
struct LstmTrace {
  Matrix<Scalar> x;
  Matrix<Scalar> zbar, z;
  Matrix<Scalar> ibar, i;
  Matrix<Scalar> fbar, f;
  Matrix<Scalar> c;
  Matrix<Scalar> obar, o;
  Matrix<Scalar> u;

  Index steps() const { return u.cols(); }
};

// Runs the recurrence left to right from y = c = 0. `inputs` holds one
// timestep per column (input_size x M).
template <typename Scalar>
LstmTrace<Scalar> lstm_forward(const LstmParams<Scalar>& p,
                               const Matrix<Scalar>& inputs) {
  if (inputs.rows() != p.input_size()) {
    throw ShapeError("lstm_forward: input rows do not match input_size");
  }
  const Index b = p.units();
  const Index m = inputs.cols();

  LstmTrace<Scalar> tr;
  tr.x = inputs;
  for (auto* mat : {&tr.zbar, &tr.z, &tr.ibar, &tr.i, &tr.fbar, &tr.f, &tr.c,
                    &tr.obar, &tr.o, &tr.u}) {
    mat->resize(b, m);
  }

  Vector<Scalar> y_prev = Vector<Scalar>::Zero(b);
  Vector<Scalar> c_prev = Vector<Scalar>::Zero(b);
  for (Index t = 0; t < m; ++t) {
    const LstmStepCache<Scalar> s =
        lstm_step<Scalar>(p, inputs.col(t), y_prev, c_prev);
    tr.zbar.col(t) = s.zbar;
    tr.z.col(t) = s.z;
    tr.ibar.col(t) = s.ibar;
    tr.i.col(t) = s.i;
    tr.fbar.col(t) = s.fbar;
    tr.f.col(t) = s.f;
    tr.c.col(t) = s.c;
    tr.obar.col(t) = s.obar;
    tr.o.col(t) = s.o;
    tr.u.col(t) = s.u;
    y_prev = s.u;
    c_prev = s.c;
  }
  return tr;
}

}  // namespace ictal
