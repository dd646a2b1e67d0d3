#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace clbench {

/// Read-only view of an N x H x W stack of fields. `step` is the element
/// stride between consecutive slabs, so the view covers both a contiguous
/// tensor (step = h*w) and one channel of a T x C x H x W series
/// (step = c*h*w).
struct CubeView {
  const float* p = nullptr;
  std::size_t n = 0, h = 0, w = 0;
  std::size_t step = 0;

  CubeView() = default;
  CubeView(const float* data, std::size_t n_, std::size_t h_, std::size_t w_)
      : p(data), n(n_), h(h_), w(w_), step(h_ * w_) {}
  CubeView(const float* data, std::size_t n_, std::size_t h_, std::size_t w_, std::size_t step_)
      : p(data), n(n_), h(h_), w(w_), step(step_) {}

  float operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return p[k * step + i * w + j];
  }
  const float* slab(std::size_t k) const { return p + k * step; }
  std::size_t pixels() const { return h * w; }
  bool empty() const { return p == nullptr || n == 0; }
};

/// Boolean inclusion mask paired with a CubeView: either one static H x W
/// plane (n == 1, applied to every timestep) or a full N x H x W stack.
/// Nonzero means the pixel participates in the metric. A default-constructed
/// MaskView means "no mask".
struct MaskView {
  const std::uint8_t* p = nullptr;
  std::size_t n = 0, h = 0, w = 0;

  MaskView() = default;
  MaskView(const std::uint8_t* data, std::size_t n_, std::size_t h_, std::size_t w_)
      : p(data), n(n_), h(h_), w(w_) {}

  bool empty() const { return p == nullptr; }
  bool at(std::size_t k, std::size_t i, std::size_t j) const {
    if (p == nullptr) return true;
    const std::size_t kk = (n == 1) ? 0 : k;
    return p[kk * h * w + i * w + j] != 0;
  }
};

/// Owning T x C x H x W tensor of binary32 values, row-major.
struct Tensor4 {
  std::size_t t = 0, c = 0, h = 0, w = 0;
  std::vector<float> v;

  Tensor4() = default;
  Tensor4(std::size_t t_, std::size_t c_, std::size_t h_, std::size_t w_)
      : t(t_), c(c_), h(h_), w(w_), v(t_ * c_ * h_ * w_, 0.0f) {}

  float& at(std::size_t k, std::size_t ci, std::size_t i, std::size_t j) {
    return v[((k * c + ci) * h + i) * w + j];
  }
  float at(std::size_t k, std::size_t ci, std::size_t i, std::size_t j) const {
    return v[((k * c + ci) * h + i) * w + j];
  }
  std::size_t size() const { return t * c * h * w; }

  /// View of one channel across all timesteps.
  CubeView channel(std::size_t ci) const {
    return CubeView(v.data() + ci * h * w, t, h, w, c * h * w);
  }
};

}  // namespace clbench
