// Plain-loop reference implementations used as independent oracles. These
// deliberately avoid Eigen and the library's forward/backward code paths;
// everything is std::vector and explicit index arithmetic.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // row-major

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec matvec(const Mat& w, const Vec& x) {
  Vec y(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      acc += w[r][c] * x[c];
    }
    y[r] = acc;
  }
  return y;
}

struct LstmWeights {
  Mat Wz, Wi, Wf, Wo;
  Mat Rz, Ri, Rf, Ro;
  Vec Pi, Pf, Po;
  Vec bz, bi, bf, bo;
};

struct LstmStepValues {
  Vec zbar, z, ibar, i, fbar, f, c, obar, o, u;
};

inline LstmStepValues lstm_step(const LstmWeights& w, const Vec& x,
                                const Vec& y_prev, const Vec& c_prev) {
  const std::size_t units = w.bz.size();
  LstmStepValues s;
  s.zbar = matvec(w.Wz, x);
  s.ibar = matvec(w.Wi, x);
  s.fbar = matvec(w.Wf, x);
  s.obar = matvec(w.Wo, x);
  const Vec rz = matvec(w.Rz, y_prev);
  const Vec ri = matvec(w.Ri, y_prev);
  const Vec rf = matvec(w.Rf, y_prev);
  const Vec ro = matvec(w.Ro, y_prev);

  s.z.resize(units);
  s.i.resize(units);
  s.f.resize(units);
  s.c.resize(units);
  s.o.resize(units);
  s.u.resize(units);
  for (std::size_t k = 0; k < units; ++k) {
    s.zbar[k] += rz[k] + w.bz[k];
    s.z[k] = std::tanh(s.zbar[k]);
    s.ibar[k] += ri[k] + w.Pi[k] * c_prev[k] + w.bi[k];
    s.i[k] = sigmoid(s.ibar[k]);
    s.fbar[k] += rf[k] + w.Pf[k] * c_prev[k] + w.bf[k];
    s.f[k] = sigmoid(s.fbar[k]);
    s.c[k] = s.z[k] * s.i[k] + c_prev[k] * s.f[k];
  }
  for (std::size_t k = 0; k < units; ++k) {
    s.obar[k] += ro[k] + w.Po[k] * s.c[k] + w.bo[k];
    s.o[k] = sigmoid(s.obar[k]);
    s.u[k] = std::tanh(s.c[k]) * s.o[k];
  }
  return s;
}

// Unrolled forward from zero state; inputs holds one timestep per entry.
inline std::vector<LstmStepValues> lstm_forward(const LstmWeights& w,
                                                const std::vector<Vec>& inputs) {
  const std::size_t units = w.bz.size();
  Vec y(units, 0.0);
  Vec c(units, 0.0);
  std::vector<LstmStepValues> steps;
  for (const Vec& x : inputs) {
    LstmStepValues s = lstm_step(w, x, y, c);
    y = s.u;
    c = s.c;
    steps.push_back(std::move(s));
  }
  return steps;
}

inline Vec dense_tanh(const Mat& w, const Vec& b, const Vec& x) {
  Vec y = matvec(w, x);
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = std::tanh(y[k] + b[k]);
  }
  return y;
}

inline Vec column_mean(const std::vector<Vec>& rows) {
  assert(!rows.empty());
  Vec mean(rows.front().size(), 0.0);
  for (const Vec& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      mean[k] += row[k];
    }
  }
  for (double& v : mean) {
    v /= static_cast<double>(rows.size());
  }
  return mean;
}

inline Vec softmax(const Vec& logits) {
  double shift = logits[0];
  for (double v : logits) {
    shift = std::max(shift, v);
  }
  Vec p(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - shift);
    total += p[k];
  }
  for (double& v : p) {
    v /= total;
  }
  return p;
}

inline double cross_entropy(const std::vector<Vec>& posteriors,
                            const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t n = 0; n < posteriors.size(); ++n) {
    total -= std::log(posteriors[n][static_cast<std::size_t>(labels[n])]);
  }
  return total / static_cast<double>(posteriors.size());
}

}  // namespace oracle
