#pragma once

#include <cstddef>
#include <vector>

namespace clbench {

/// Rectilinear latitude-longitude grid of cell centers.
///
/// Latitudes are strictly monotonic (either direction) in [-90, 90].
/// Longitudes are strictly increasing, in [0, 360) or [-180, 180); spacing
/// must be uniform when periodic_lon is set, in which case longitude
/// arithmetic wraps modulo 360 (index modulo W). All values are immutable
/// after construction and safe to share across threads.
struct Grid {
  std::vector<double> lats;
  std::vector<double> lons;
  bool periodic_lon = false;

  std::size_t h() const { return lats.size(); }
  std::size_t w() const { return lons.size(); }

  /// Validates the invariants above; throws Error on violation.
  void validate() const;

  bool operator==(const Grid&) const = default;
};

/// Per-row latitude weights L(i) = cos(lat_i) / mean_j cos(lat_j).
/// mean(w) == 1 within 1e-12 by construction.
struct LatWeights {
  std::vector<double> w;
};

/// Geographic selection box in degrees. Selects cell centers with
/// lat in [lat_min, lat_max] and lon in [lon_min, lon_max]; the longitude
/// interval may straddle the wrap seam on periodic grids (lon_min > lon_max
/// after normalization selects the union of both sides).
struct RegionBox {
  double lat_min = -90.0, lat_max = 90.0;
  double lon_min = 0.0, lon_max = 360.0;
};

/// Row/column index selection produced by subgrid_indices. Rows are ascending
/// and contiguous; cols follow grid order and may be two ranges concatenated
/// when the box straddles the longitude wrap.
struct SubgridIndices {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

LatWeights make_lat_weights(const Grid& grid);

/// Global cell-center grid at the given resolution: H = 180/deg rows with
/// centers -90+deg/2 ... 90-deg/2, W = 360/deg columns starting at lon 0,
/// periodic in longitude. deg must divide both 180 and 360 evenly.
Grid grid_from_resolution(double deg);

SubgridIndices subgrid_indices(const Grid& grid, const RegionBox& box);

/// Conterminous-US box; selects 9 x 21 cells on the 2.8125-degree grid.
RegionBox conus_box();

}  // namespace clbench
