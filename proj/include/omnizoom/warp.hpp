#pragma once

#include <variant>

#include "omnizoom/geometry.hpp"
#include "omnizoom/image.hpp"
#include "omnizoom/resampler.hpp"

namespace omnizoom {

enum class WarpOrder { upsample_then_transform, transform_then_upsample };

/// A raw Mobius matrix is used directly as the sampling transform (the source
/// is read at m(X)). ViewControls describe content motion, so they are sampled
/// through inverse(from_controls(v)).
using ViewSpec = std::variant<Mobiusd, ViewControlsd>;

struct WarpRequest {
  ViewSpec view = Mobiusd::identity();
  int scale = 1;  // one of 1, 2, 4, 8, 16
  ResampleKernel kernel = ResampleKernel::spherical;
  WarpOrder order = WarpOrder::upsample_then_transform;
  SlerpWeighting weighting = SlerpWeighting::normalized;
  int threads = 0;
};

bool valid_scale(int scale);

Mobiusd sampling_matrix(const ViewSpec& view);

/// Bicubic (a = -0.5) upsampling by an integer factor; longitude wraps at the
/// left/right seam, latitude clamps at the top/bottom edge.
ErpImage upsample(const ErpImage& src, int factor, int threads = 0);

/// factor x factor box average.
ErpImage downsample(const ErpImage& src, int factor);

/// resample(src, build_index_map(out_h, out_w, m)) with the given kernel.
ErpImage warp_to(const ErpImage& src, const Mobiusd& sampling, Index out_height, Index out_width,
                 ResampleKernel kernel, const ResampleOptions& options = {});

ErpImage warp(const ErpImage& src, const WarpRequest& request);

}  // namespace omnizoom
