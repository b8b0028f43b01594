#pragma once

#include <memory>

namespace csweep {

// Channel-wise image prior applied inside the reconstruction's u-step.
// Implementations run in place on plane-major buffers and must be
// deterministic for a fixed input.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual void apply(double* planes, int channels, int height, int width) const = 0;
};

std::shared_ptr<const Denoiser> make_identity_denoiser();
// Elementwise soft threshold: shrink magnitudes by tau.
std::shared_ptr<const Denoiser> make_soft_threshold_denoiser(double tau);
// Total-variation proximal step (dual projection scheme, a fixed number of
// inner iterations per application).
std::shared_ptr<const Denoiser> make_tv_denoiser(double weight, int inner_iterations);

}  // namespace csweep
