#pragma once

#include <cstdint>
#include <vector>

#include "clbench/grid.hpp"
#include "clbench/store.hpp"
#include "clbench/tensor.hpp"

namespace clbench {

/// Single H x W field with its grid.
struct GridField {
  Grid grid;
  std::vector<float> v;  // row-major h x w

  float at(std::size_t i, std::size_t j) const { return v[i * grid.w() + j]; }
};

/// Padded field plus the validity mask emitted by pad_to (1 inside the
/// source block, 0 in the fill region).
struct PaddedField {
  std::size_t h = 0, w = 0;
  std::vector<float> v;
  std::vector<std::uint8_t> mask;
};

enum class InterpScheme { nearest, bilinear };

/// Nearest-neighbor resampling: each target cell takes the value of the
/// source cell whose center minimizes squared per-axis angular distance
/// (longitude difference taken modulo 360 on periodic grids). Distance ties
/// break toward the smaller source index.
GridField regrid_nearest(const GridField& src, const Grid& target);

/// Bilinear resampling over the 4 surrounding source centers. Longitude
/// wraps across the seam on periodic grids; latitudes beyond the outermost
/// centers clamp to the edge row. A NaN stencil corner makes the output NaN.
GridField regrid_bilinear(const GridField& src, const Grid& target);

GridField regrid(const GridField& src, const Grid& target, InterpScheme scheme);

/// Whole-series resampling, channel by channel.
FieldSeries regrid_series(const FieldSeries& src, const Grid& target, InterpScheme scheme);

/// Crop to the cells selected by subgrid_indices(box). When the selection
/// wraps the longitude seam the cropped lons are re-expressed as a strictly
/// increasing sequence (leading columns shifted by -360).
GridField crop(const GridField& src, const RegionBox& box);
FieldSeries crop_series(const FieldSeries& src, const RegionBox& box);

/// Places the h x w source block at (row0, col0) inside an h_out x w_out
/// canvas filled with `fill`, and returns the block-validity mask.
PaddedField pad_to(const std::vector<float>& field, std::size_t h, std::size_t w,
                   std::size_t h_out, std::size_t w_out, float fill, std::size_t row0,
                   std::size_t col0);

}  // namespace clbench
