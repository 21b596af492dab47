#include "muller/resize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "muller/error.hpp"
#include "parallel_for.hpp"
#include "sample_taps.hpp"

namespace muller {

using detail::LinearTap;
using detail::linear_taps;
using detail::nearest_index;

std::string to_string(ResizeMethod method) {
  switch (method) {
    case ResizeMethod::Bilinear:
      return "bilinear";
    case ResizeMethod::Nearest:
      return "nearest";
    case ResizeMethod::Area:
      return "area";
  }
  return "bilinear";
}

ResizeMethod parse_resize_method(const std::string& name) {
  if (name == "bilinear") return ResizeMethod::Bilinear;
  if (name == "nearest") return ResizeMethod::Nearest;
  if (name == "area") return ResizeMethod::Area;
  fail(ErrorCode::InvalidArgument, "unknown resize method '" + name + "'");
}

void ResizeSpec::validate() const {
  if (in_h < 1 || in_w < 1 || out_h < 1 || out_w < 1) {
    fail(ErrorCode::Dimension, "resize dimensions must all be at least 1");
  }
  if (method == ResizeMethod::Area && (out_h > in_h || out_w > in_w)) {
    fail(ErrorCode::InvalidArgument, "area resize only supports downscaling");
  }
}

namespace {

void check_target(int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    fail(ErrorCode::Dimension, "target dimensions must be at least 1x1");
  }
}

// a + f (b - a), held inside [min(a, b), max(a, b)].
inline double blend(double a, double b, double f) {
  const double v = a + f * (b - a);
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

struct AreaTerm {
  int index;
  double weight;
};

// Output t covers [t * in, (t + 1) * in) in units of 1/out; source pixel i
// covers [i * out, (i + 1) * out). Overlaps are exact integers.
std::vector<std::vector<AreaTerm>> area_terms(int in, int out) {
  std::vector<std::vector<AreaTerm>> terms(static_cast<std::size_t>(out));
  const std::int64_t n_in = in;
  const std::int64_t n_out = out;
  for (std::int64_t t = 0; t < n_out; ++t) {
    const std::int64_t lo = t * n_in;
    const std::int64_t hi = (t + 1) * n_in;
    for (std::int64_t i = lo / n_out; i < n_in && i * n_out < hi; ++i) {
      const std::int64_t overlap = std::min(hi, (i + 1) * n_out) - std::max(lo, i * n_out);
      if (overlap > 0) {
        terms[static_cast<std::size_t>(t)].push_back(
            {static_cast<int>(i), static_cast<double>(overlap) / static_cast<double>(n_in)});
      }
    }
  }
  return terms;
}

}  // namespace

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  check_target(out_h, out_w);
  const int c = img.channels();
  const auto ys = linear_taps(img.height(), out_h);
  const auto xs = linear_taps(img.width(), out_w);
  Image out(out_h, out_w, c);

  detail::parallel_rows(out_h, [&](int begin, int end) {
    for (int ty = begin; ty < end; ++ty) {
      const LinearTap& yt = ys[static_cast<std::size_t>(ty)];
      const double* r0 = img.row(yt.i0);
      const double* r1 = img.row(yt.i1);
      double* dst = out.row(ty);
      for (int tx = 0; tx < out_w; ++tx) {
        const LinearTap& xt = xs[static_cast<std::size_t>(tx)];
        const int a = xt.i0 * c;
        const int b = xt.i1 * c;
        for (int ch = 0; ch < c; ++ch) {
          const double top = blend(r0[a + ch], r0[b + ch], xt.f);
          const double bottom = blend(r1[a + ch], r1[b + ch], xt.f);
          dst[tx * c + ch] = blend(top, bottom, yt.f);
        }
      }
    }
  });
  return out;
}

Image resize_nearest(const Image& img, int out_h, int out_w) {
  check_target(out_h, out_w);
  const int c = img.channels();
  const auto ys = nearest_index(img.height(), out_h);
  const auto xs = nearest_index(img.width(), out_w);
  Image out(out_h, out_w, c);
  for (int ty = 0; ty < out_h; ++ty) {
    const double* src = img.row(ys[static_cast<std::size_t>(ty)]);
    double* dst = out.row(ty);
    for (int tx = 0; tx < out_w; ++tx) {
      const int sx = xs[static_cast<std::size_t>(tx)] * c;
      for (int ch = 0; ch < c; ++ch) {
        dst[tx * c + ch] = src[sx + ch];
      }
    }
  }
  return out;
}

Image resize_area(const Image& img, int out_h, int out_w) {
  check_target(out_h, out_w);
  if (out_h > img.height() || out_w > img.width()) {
    fail(ErrorCode::InvalidArgument, "area resize only supports downscaling");
  }
  const int c = img.channels();
  const auto xterms = area_terms(img.width(), out_w);
  const auto yterms = area_terms(img.height(), out_h);

  // Weighted averages anchored at the first contributor, clamped to the
  // contributors' range.
  Image tmp(img.height(), out_w, c);
  for (int y = 0; y < img.height(); ++y) {
    const double* src = img.row(y);
    double* dst = tmp.row(y);
    for (int tx = 0; tx < out_w; ++tx) {
      const auto& terms = xterms[static_cast<std::size_t>(tx)];
      for (int ch = 0; ch < c; ++ch) {
        const double anchor = src[terms.front().index * c + ch];
        double acc = 0.0;
        double lo = anchor;
        double hi = anchor;
        for (const AreaTerm& term : terms) {
          const double v = src[term.index * c + ch];
          acc += term.weight * (v - anchor);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        dst[tx * c + ch] = std::clamp(anchor + acc, lo, hi);
      }
    }
  }

  Image out(out_h, out_w, c);
  const std::size_t stride = out.row_stride();
  for (int ty = 0; ty < out_h; ++ty) {
    const auto& terms = yterms[static_cast<std::size_t>(ty)];
    const double* anchor = tmp.row(terms.front().index);
    double* dst = out.row(ty);
    for (std::size_t i = 0; i < stride; ++i) {
      double acc = 0.0;
      double lo = anchor[i];
      double hi = anchor[i];
      for (const AreaTerm& term : terms) {
        const double v = tmp.row(term.index)[i];
        acc += term.weight * (v - anchor[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      dst[i] = std::clamp(anchor[i] + acc, lo, hi);
    }
  }
  return out;
}

Image resize(const Image& img, int out_h, int out_w, ResizeMethod method) {
  switch (method) {
    case ResizeMethod::Bilinear:
      return resize_bilinear(img, out_h, out_w);
    case ResizeMethod::Nearest:
      return resize_nearest(img, out_h, out_w);
    case ResizeMethod::Area:
      return resize_area(img, out_h, out_w);
  }
  fail(ErrorCode::InvalidArgument, "unknown resize method");
}

Image resize_bilinear_vjp(int in_h, int in_w, int out_h, int out_w, const Image& cotangent) {
  if (in_h < 1 || in_w < 1) {
    fail(ErrorCode::Dimension, "source dimensions must be at least 1x1");
  }
  if (cotangent.empty() || cotangent.height() != out_h || cotangent.width() != out_w) {
    fail(ErrorCode::Dimension, "cotangent shape does not match the resize target");
  }
  const int c = cotangent.channels();
  const auto ys = linear_taps(in_h, out_h);
  const auto xs = linear_taps(in_w, out_w);
  Image grad(in_h, in_w, c);
  for (int ty = 0; ty < out_h; ++ty) {
    const LinearTap& yt = ys[static_cast<std::size_t>(ty)];
    const double* g = cotangent.row(ty);
    double* r0 = grad.row(yt.i0);
    double* r1 = grad.row(yt.i1);
    for (int tx = 0; tx < out_w; ++tx) {
      const LinearTap& xt = xs[static_cast<std::size_t>(tx)];
      const double w00 = (1.0 - yt.f) * (1.0 - xt.f);
      const double w01 = (1.0 - yt.f) * xt.f;
      const double w10 = yt.f * (1.0 - xt.f);
      const double w11 = yt.f * xt.f;
      const int a = xt.i0 * c;
      const int b = xt.i1 * c;
      for (int ch = 0; ch < c; ++ch) {
        const double v = g[tx * c + ch];
        r0[a + ch] += w00 * v;
        r0[b + ch] += w01 * v;
        r1[a + ch] += w10 * v;
        r1[b + ch] += w11 * v;
      }
    }
  }
  return grad;
}

}  // namespace muller
