#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ictal/nn/model.hpp"
#include "ictal/rng.hpp"

namespace ictal {

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;  // over the absolute-fallback coordinates
  int coordinates_checked = 0;
  double tolerance = 0.0;
  bool passed = false;
  std::string worst_tensor;
};

// Compares model_backward against central finite differences of the forward
// loss. When |analytic| + |numeric| < 1e-8 the relative quotient is
// meaningless, so those coordinates are held to the absolute tolerance
// instead. `max_coordinates` == 0 checks every coordinate; otherwise a
// seeded subset of that size is sampled.
inline GradCheckReport gradient_check(const ModelParams<double>& params,
                                      const Matrixd& segments, int label,
                                      double step, double tolerance,
                                      Index max_coordinates = 0,
                                      std::uint64_t seed = 0) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("gradient_check: step must be positive");
  }
  const ModelParams<double> analytic =
      model_backward(params, model_forward(params, segments), label);

  ModelParams<double> work = params;
  auto work_refs = tensor_list(work);
  const auto grad_refs = tensor_list(analytic);

  const Index total = parameter_count(params);
  std::vector<Index> coords;
  if (max_coordinates == 0 || max_coordinates >= total) {
    coords.resize(static_cast<std::size_t>(total));
    for (Index k = 0; k < total; ++k) {
      coords[static_cast<std::size_t>(k)] = k;
    }
  } else {
    Rng rng(seed);
    coords.reserve(static_cast<std::size_t>(max_coordinates));
    for (Index k = 0; k < max_coordinates; ++k) {
      coords.push_back(static_cast<Index>(rng.below(
          static_cast<std::uint64_t>(total))));
    }
  }

  constexpr double kAbsoluteFallback = 1e-8;
  GradCheckReport report;
  report.tolerance = tolerance;

  for (const Index flat : coords) {
    // Locate (tensor, offset) for the flat coordinate.
    std::size_t tensor = 0;
    Index offset = flat;
    while (offset >= work_refs[tensor].size) {
      offset -= work_refs[tensor].size;
      ++tensor;
    }
    double* slot = work_refs[tensor].data + offset;
    const double saved = *slot;

    *slot = saved + step;
    const double loss_plus =
        loss_from_trace(model_forward(work, segments), label);
    *slot = saved - step;
    const double loss_minus =
        loss_from_trace(model_forward(work, segments), label);
    *slot = saved;

    const double numeric = (loss_plus - loss_minus) / (2.0 * step);
    const double exact = grad_refs[tensor].data[offset];
    const double scale = std::abs(exact) + std::abs(numeric);
    const double abs_err = std::abs(exact - numeric);
    if (scale < kAbsoluteFallback) {
      if (abs_err > report.max_absolute_error) {
        report.max_absolute_error = abs_err;
        if (report.worst_tensor.empty()) {
          report.worst_tensor = work_refs[tensor].name;
        }
      }
    } else {
      const double rel = abs_err / scale;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_tensor = work_refs[tensor].name;
      }
    }
    ++report.coordinates_checked;
  }

  report.passed = report.max_relative_error <= tolerance &&
                  report.max_absolute_error <= tolerance;
  return report;
}

}  // namespace ictal
