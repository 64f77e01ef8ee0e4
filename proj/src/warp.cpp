#include "omnizoom/warp.hpp"

#include <array>
#include <cmath>

#include "omnizoom/index_map.hpp"
#include "omnizoom/parallel.hpp"

namespace omnizoom {

bool valid_scale(int scale) {
  return scale == 1 || scale == 2 || scale == 4 || scale == 8 || scale == 16;
}

Mobiusd sampling_matrix(const ViewSpec& view) {
  if (const auto* m = std::get_if<Mobiusd>(&view)) return *m;
  return inverse(from_controls(std::get<ViewControlsd>(view)));
}

namespace {

struct CubicTaps {
  std::array<Index, 4> index;
  std::array<double, 4> weight;
};

// Output coordinate k on an axis upsampled by `factor` reads the source at
// (k + 0.5) / factor - 0.5.
std::vector<CubicTaps> axis_taps(Index src_len, int factor, bool wrap) {
  std::vector<CubicTaps> taps(src_len * factor);
  for (Index k = 0; k < static_cast<Index>(taps.size()); ++k) {
    const double pos = (static_cast<double>(k) + 0.5) / factor - 0.5;
    const double base = std::floor(pos);
    const auto w = detail::cubic_weights(pos - base);
    for (int t = 0; t < 4; ++t) {
      const Index idx = static_cast<Index>(base) - 1 + t;
      taps[k].index[t] = wrap ? wrap_index(idx, src_len) : clamp_index(idx, src_len);
      taps[k].weight[t] = w[t];
    }
  }
  return taps;
}

}  // namespace

ErpImage upsample(const ErpImage& src, int factor, int threads) {
  if (factor < 1) throw Error(ErrorCode::bad_dims, "upsampling factor must be >= 1");
  if (src.empty()) throw Error(ErrorCode::bad_dims, "empty image");
  if (factor == 1) return src;

  const Index h = src.height();
  const Index w = src.width();
  const Index ch = src.channels();
  const auto col_taps = axis_taps(w, factor, true);
  const auto row_taps = axis_taps(h, factor, false);

  // Horizontal pass at source rows, then vertical pass.
  ErpImage wide(h, w * factor, ch, AspectPolicy::any);
  parallel_for_bands(h, threads, [&](Index r0, Index r1) {
    for (Index i = r0; i < r1; ++i) {
      for (Index j = 0; j < w * factor; ++j) {
        const auto& t = col_taps[j];
        double* dst = wide.pixel(i, j);
        for (Index c = 0; c < ch; ++c) {
          dst[c] = t.weight[0] * src(i, t.index[0], c) + t.weight[1] * src(i, t.index[1], c) +
                   t.weight[2] * src(i, t.index[2], c) + t.weight[3] * src(i, t.index[3], c);
        }
      }
    }
  });

  ErpImage out(h * factor, w * factor, ch, AspectPolicy::any);
  parallel_for_bands(h * factor, threads, [&](Index r0, Index r1) {
    for (Index i = r0; i < r1; ++i) {
      const auto& t = row_taps[i];
      out.samples().row(i) = (t.weight[0] * wide.samples().row(t.index[0]) +
                              t.weight[1] * wide.samples().row(t.index[1]) +
                              t.weight[2] * wide.samples().row(t.index[2]) +
                              t.weight[3] * wide.samples().row(t.index[3]))
                                 .cwiseMax(0.0)
                                 .cwiseMin(1.0);
    }
  });
  return out;
}

ErpImage downsample(const ErpImage& src, int factor) {
  if (factor < 1) throw Error(ErrorCode::bad_dims, "downsampling factor must be >= 1");
  if (src.empty() || src.height() % factor != 0 || src.width() % factor != 0) {
    throw Error(ErrorCode::bad_dims, "image dimensions not divisible by the downsampling factor");
  }
  if (factor == 1) return src;

  const Index h = src.height() / factor;
  const Index w = src.width() / factor;
  const Index ch = src.channels();
  ErpImage out(h, w, ch, AspectPolicy::any);
  const double norm = 1.0 / (static_cast<double>(factor) * factor);
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < w; ++j) {
      for (Index c = 0; c < ch; ++c) {
        double sum = 0;
        for (int di = 0; di < factor; ++di) {
          for (int dj = 0; dj < factor; ++dj) sum += src(i * factor + di, j * factor + dj, c);
        }
        out(i, j, c) = sum * norm;
      }
    }
  }
  return out;
}

ErpImage warp_to(const ErpImage& src, const Mobiusd& sampling, Index out_height, Index out_width,
                 ResampleKernel kernel, const ResampleOptions& options) {
  const IndexMapd y = build_index_map(out_height, out_width, sampling, options.threads);
  return resample(src, y, kernel, options);
}

ErpImage warp(const ErpImage& src, const WarpRequest& request) {
  if (!valid_scale(request.scale)) throw Error(ErrorCode::bad_dims, "scale must be one of 1, 2, 4, 8, 16");
  if (src.empty()) throw Error(ErrorCode::bad_dims, "empty image");

  const Mobiusd m = sampling_matrix(request.view);
  const ResampleOptions options{request.weighting, request.threads};
  if (request.order == WarpOrder::upsample_then_transform) {
    const ErpImage hr = upsample(src, request.scale, request.threads);
    return warp_to(hr, m, hr.height(), hr.width(), request.kernel, options);
  }
  const ErpImage lr = warp_to(src, m, src.height(), src.width(), request.kernel, options);
  return upsample(lr, request.scale, request.threads);
}

}  // namespace omnizoom
