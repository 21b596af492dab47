#include "band_operator.hpp"

#include <algorithm>

#include "muller/error.hpp"
#include "parallel_for.hpp"
#include "sample_taps.hpp"
#include "simd.hpp"

namespace muller::detail {

AxisOperator smoothed_resize_axis(int in, int out, ResizeMethod method,
                                  const GaussianKernel1D& kernel, int power) {
  if (method == ResizeMethod::Area) {
    fail(ErrorCode::Unsupported, "fused smoothing supports bilinear and nearest only");
  }
  AxisOperator op;
  op.in = in;
  op.out = out;
  op.first.resize(static_cast<std::size_t>(out));
  op.count.resize(static_cast<std::size_t>(out));
  op.anchor.resize(static_cast<std::size_t>(out));
  op.offset.resize(static_cast<std::size_t>(out));

  std::vector<LinearTap> linear;
  std::vector<int> nearest;
  if (method == ResizeMethod::Bilinear) {
    linear = linear_taps(in, out);
  } else {
    nearest = nearest_index(in, out);
  }

  const int r = kernel.radius();
  std::vector<double> row(static_cast<std::size_t>(in));
  std::vector<double> next(static_cast<std::size_t>(in));
  for (int t = 0; t < out; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    int lo = 0;
    int hi = 0;
    if (method == ResizeMethod::Bilinear) {
      const LinearTap& tap = linear[ut];
      lo = tap.i0;
      hi = tap.i1;
      row[static_cast<std::size_t>(lo)] = 1.0 - tap.f;
      row[static_cast<std::size_t>(hi)] += tap.f;
    } else {
      lo = hi = nearest[ut];
      row[static_cast<std::size_t>(lo)] = 1.0;
    }
    // row <- row * W, i.e. scatter each entry onto its clamped taps.
    for (int p = 0; p < power && kernel.ksize > 1; ++p) {
      const int nlo = std::max(0, lo - r);
      const int nhi = std::min(in - 1, hi + r);
      for (int i = lo; i <= hi; ++i) {
        const double v = row[static_cast<std::size_t>(i)];
        for (int d = -r; d <= r; ++d) {
          next[static_cast<std::size_t>(std::clamp(i + d, 0, in - 1))] +=
              v * kernel.taps[static_cast<std::size_t>(d + r)];
        }
      }
      for (int i = lo; i <= hi; ++i) row[static_cast<std::size_t>(i)] = 0.0;
      for (int i = nlo; i <= nhi; ++i) {
        row[static_cast<std::size_t>(i)] = next[static_cast<std::size_t>(i)];
        next[static_cast<std::size_t>(i)] = 0.0;
      }
      lo = nlo;
      hi = nhi;
    }
    op.first[ut] = lo;
    op.count[ut] = hi - lo + 1;
    op.offset[ut] = op.weights.size();
    int best = lo;
    for (int i = lo; i <= hi; ++i) {
      const double w = row[static_cast<std::size_t>(i)];
      if (w > row[static_cast<std::size_t>(best)]) best = i;
      op.weights.push_back(w);
      row[static_cast<std::size_t>(i)] = 0.0;
    }
    op.anchor[ut] = best;
  }
  return op;
}

namespace {

MULLER_HOT_LOOP
void add_weighted_difference(double* __restrict dst, const double* __restrict src,
                             const double* __restrict anchor, double w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += w * (src[i] - anchor[i]);
}

template <int C>
void apply_cols(const Image& in, Image& out, const AxisOperator& op) {
  parallel_rows(in.height(), [&](int begin, int end) {
    for (int y = begin; y < end; ++y) {
      const double* src = in.row(y);
      double* dst = out.row(y);
      for (int t = 0; t < op.out; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        const double* w = op.weights.data() + op.offset[ut];
        const double* base = src + static_cast<std::ptrdiff_t>(op.first[ut]) * C;
        const double* anchor = src + static_cast<std::ptrdiff_t>(op.anchor[ut]) * C;
        double acc[C] = {};
        for (int j = 0; j < op.count[ut]; ++j) {
          for (int ch = 0; ch < C; ++ch) {
            acc[ch] += w[j] * (base[j * C + ch] - anchor[ch]);
          }
        }
        for (int ch = 0; ch < C; ++ch) {
          dst[t * C + ch] = anchor[ch] + acc[ch];
        }
      }
    }
  });
}

// out.row(t) = in.row(anchor) + sum_j w_j (in.row(first + j) - in.row(anchor)).
void apply_rows(const Image& in, Image& out, const AxisOperator& op) {
  const std::size_t stride = in.row_stride();
  parallel_rows(op.out, [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const double* anchor = in.row(op.anchor[ut]);
      const double* w = op.weights.data() + op.offset[ut];
      double* dst = out.row(t);
      for (int j = 0; j < op.count[ut]; ++j) {
        add_weighted_difference(dst, in.row(op.first[ut] + j), anchor, w[j], stride);
      }
      for (std::size_t i = 0; i < stride; ++i) {
        dst[i] = anchor[i] + dst[i];
      }
    }
  });
}

}  // namespace

Image apply_separable(const Image& img, const AxisOperator& rows, const AxisOperator& cols) {
  if (rows.in != img.height() || cols.in != img.width()) {
    fail(ErrorCode::Dimension, "operator does not match the image size");
  }
  Image tmp(rows.out, img.width(), img.channels());
  apply_rows(img, tmp, rows);
  Image out(rows.out, cols.out, img.channels());
  switch (img.channels()) {
    case 1:
      apply_cols<1>(tmp, out, cols);
      break;
    case 3:
      apply_cols<3>(tmp, out, cols);
      break;
    default:
      fail(ErrorCode::Unsupported, "images must have 1 or 3 channels");
  }
  return out;
}

}  // namespace muller::detail
