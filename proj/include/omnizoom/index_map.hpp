#pragma once

#include "omnizoom/geometry.hpp"
#include "omnizoom/image.hpp"
#include "omnizoom/parallel.hpp"

namespace omnizoom {

/// Transformed spatial index map: for every output pixel center X[i, j],
/// Y[i, j] = SP^-1(STP^-1(m(STP(SP(X[i, j]))))). The source is sampled at Y.
template <typename Scalar>
IndexMap<Scalar> build_index_map(Index height, Index width, const Mobius<Scalar>& m, int threads = 0) {
  if (height < 2 || width < 4) throw Error(ErrorCode::bad_dims, "index map needs h >= 2 and w >= 4");

  IndexMap<Scalar> y(height, width);
  parallel_for_bands(height, threads, [&](Index row_begin, Index row_end) {
    for (Index i = row_begin; i < row_end; ++i) {
      const Scalar phi = row_latitude<Scalar>(i, height);
      for (Index j = 0; j < width; ++j) {
        SphericalCoord<Scalar> x;
        x.theta = column_longitude<Scalar>(j, width);
        x.phi = phi;
        y.set(i, j, sp_inv(map_sphere(m, sp(x))));
      }
    }
  });
  return y;
}

/// The untransformed grid X (pixel centers).
template <typename Scalar = double>
IndexMap<Scalar> identity_index_map(Index height, Index width) {
  if (height < 2 || width < 4) throw Error(ErrorCode::bad_dims, "index map needs h >= 2 and w >= 4");
  IndexMap<Scalar> x(height, width);
  for (Index i = 0; i < height; ++i) {
    for (Index j = 0; j < width; ++j) {
      SphericalCoord<Scalar> c;
      c.theta = column_longitude<Scalar>(j, width);
      c.phi = row_latitude<Scalar>(i, height);
      x.set(i, j, c);
    }
  }
  return x;
}

}  // namespace omnizoom
