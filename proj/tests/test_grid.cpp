#include "doctest.h"

#include <cmath>

#include "clbench/error.hpp"
#include "clbench/grid.hpp"
#include "clbench/rng.hpp"

#include "support/test_util.hpp"

using namespace clbench;

namespace {

// Frozen from a high-precision evaluation of cos(lat)/mean(cos) at the 32
// standard 5.625-degree cell centers (-87.1875 ... +87.1875).
const double kWeights5p625[32] = {
    0.07704437324484982, 0.23039114030346299, 0.38151911473634535, 0.52897285153475374,
    0.67133229060690762, 0.80722643273295668, 0.93534654303693242, 1.054458754819031,
    1.1634159523664324,  1.2611688183046924,  1.3467759390976732,  1.419412871374526,
    1.4783800817700385,  1.5231096838133456,  1.5531709069850827,  1.5682742452729696,
    1.5682742452729696,  1.5531709069850827,  1.5231096838133456,  1.4783800817700385,
    1.419412871374526,   1.3467759390976732,  1.2611688183046924,  1.1634159523664324,
    1.054458754819031,   0.93534654303693242, 0.80722643273295668, 0.67133229060690762,
    0.52897285153475374, 0.38151911473634535, 0.23039114030346299, 0.07704437324484982};

}  // namespace

TEST_CASE("lat weights: single equator row") {
  Grid g;
  g.lats = {0.0};
  g.lons = {0.0};
  const LatWeights w = make_lat_weights(g);
  CHECK(w.w.size() == 1);
  CHECK(w.w[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lat weights: symmetric pair normalizes to ones") {
  Grid g;
  g.lats = {-60.0, 60.0};
  g.lons = {0.0};
  const LatWeights w = make_lat_weights(g);
  CHECK(w.w[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.w[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lat weights: standard 5.625-degree vector") {
  const Grid g = grid_from_resolution(5.625);
  REQUIRE(g.lats.size() == 32);
  CHECK(g.lats.front() == doctest::Approx(-87.1875).epsilon(1e-14));
  CHECK(g.lats.back() == doctest::Approx(87.1875).epsilon(1e-14));
  const LatWeights w = make_lat_weights(g);
  for (std::size_t i = 0; i < 32; ++i)
    CHECK(w.w[i] == doctest::Approx(kWeights5p625[i]).epsilon(1e-13));
  // Equator rows outweigh polar rows.
  CHECK(w.w[15] > w.w[0]);
  CHECK(w.w[16] > w.w[31]);
}

TEST_CASE("lat weights: mean is one and mirroring reverses weights") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t h = 1 + static_cast<std::size_t>(rng.uniform_index(40));
    Grid g = testutil::random_grid(rng, h, 4);
    const LatWeights w = make_lat_weights(g);
    double mean = 0.0;
    for (double v : w.w) mean += v;
    mean /= static_cast<double>(w.w.size());
    CHECK(std::abs(mean - 1.0) <= 1e-12);

    Grid mirrored = g;
    std::reverse(mirrored.lats.begin(), mirrored.lats.end());
    const LatWeights wm = make_lat_weights(mirrored);
    for (std::size_t i = 0; i < h; ++i) CHECK(wm.w[i] == w.w[h - 1 - i]);
  }
}

TEST_CASE("lat weights: out-of-range latitude rejected") {
  Grid g;
  g.lats = {91.0};
  g.lons = {0.0};
  CHECK_THROWS_AS(make_lat_weights(g), Error);
  try {
    make_lat_weights(g);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_coordinate);
  }
}

TEST_CASE("grid_from_resolution: standard benchmark resolutions") {
  const Grid g1 = grid_from_resolution(5.625);
  CHECK(g1.h() == 32);
  CHECK(g1.w() == 64);
  CHECK(g1.periodic_lon);

  const Grid g2 = grid_from_resolution(2.8125);
  CHECK(g2.h() == 64);
  CHECK(g2.w() == 128);

  const Grid g3 = grid_from_resolution(90.0);
  CHECK(g3.h() == 2);
  CHECK(g3.w() == 4);
  CHECK(g3.lats[0] == doctest::Approx(-45.0));
  CHECK(g3.lats[1] == doctest::Approx(45.0));
}

TEST_CASE("grid_from_resolution: non-divisor rejected") {
  CHECK_THROWS_AS(grid_from_resolution(7.0), Error);
  try {
    grid_from_resolution(7.0);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_resolution);
  }
}

TEST_CASE("subgrid_indices: full extent is the identity selection") {
  const Grid g = grid_from_resolution(5.625);
  const SubgridIndices sel = subgrid_indices(g, RegionBox{-90, 90, 0, 360});
  REQUIRE(sel.rows.size() == 32);
  REQUIRE(sel.cols.size() == 64);
  for (std::size_t i = 0; i < 32; ++i) CHECK(sel.rows[i] == i);
  for (std::size_t j = 0; j < 64; ++j) CHECK(sel.cols[j] == j);
}

TEST_CASE("subgrid_indices: CONUS crop of the 2.8125-degree grid is 9 x 21") {
  const Grid g = grid_from_resolution(2.8125);
  const SubgridIndices sel = subgrid_indices(g, conus_box());
  CHECK(sel.rows.size() == 9);
  CHECK(sel.cols.size() == 21);
}

TEST_CASE("subgrid_indices: box straddling the wrap concatenates two ranges") {
  const Grid g = grid_from_resolution(45.0);  // lons 0,45,...,315
  const SubgridIndices sel = subgrid_indices(g, RegionBox{-90, 90, 300.0, 50.0});
  // Brute-force membership: centers with wrapped lon >= 300 or <= 50.
  std::vector<std::size_t> expect;
  for (std::size_t j = 0; j < g.w(); ++j)
    if (g.lons[j] >= 300.0) expect.push_back(j);
  for (std::size_t j = 0; j < g.w(); ++j)
    if (g.lons[j] <= 50.0) expect.push_back(j);
  CHECK(sel.cols == expect);
  CHECK(sel.cols.front() == 7);  // 315 first, then 0 and 45
  CHECK(sel.cols[1] == 0);
}

TEST_CASE("subgrid_indices: empty selection rejected") {
  const Grid g = grid_from_resolution(45.0);
  CHECK_THROWS_AS(subgrid_indices(g, RegionBox{1.0, 2.0, 0.0, 360.0}), Error);
}
