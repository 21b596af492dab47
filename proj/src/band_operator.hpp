#pragma once

#include <vector>

#include "muller/filtering.hpp"
#include "muller/image.hpp"
#include "muller/resize.hpp"

namespace muller::detail {

// One axis of R W^p stored as banded rows: output t reads sources
// [first[t], first[t] + count[t]) with weights starting at offset[t].
struct AxisOperator {
  int in = 0;
  int out = 0;
  std::vector<int> first;
  std::vector<int> count;
  std::vector<int> anchor;
  std::vector<std::size_t> offset;
  std::vector<double> weights;
};

// Rows of (1-D base resize) * (1-D replicate-edge Gaussian)^power.
AxisOperator smoothed_resize_axis(int in, int out, ResizeMethod method,
                                  const GaussianKernel1D& kernel, int power);

// Applies rows along y, then cols along x. Each output is evaluated as
// x[anchor] + sum w_i (x[i] - x[anchor]), so constant images map exactly
// onto themselves.
Image apply_separable(const Image& img, const AxisOperator& rows, const AxisOperator& cols);

}  // namespace muller::detail
