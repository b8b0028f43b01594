#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "csweep/basis.hpp"
#include "csweep/denoise.hpp"
#include "csweep/fft.hpp"
#include "csweep/forward.hpp"
#include "csweep/types.hpp"

namespace csweep {

enum class DenoiserKind { identity, soft_threshold, total_variation };

struct SolverConfig {
  double mu1 = 1.2e-8;
  double mu2 = 1.1e-13;
  int max_iters = 9;
  double step_tolerance = 1e-3;      // stop when the relative step falls below
  double divergence_factor = 1.0;    // stop when step > factor * previous step
  int halving_check_iter = 4;        // basis shrink test runs once, at this iteration
  double halving_threshold = 0.5;    // relative z/u disagreement that triggers it
  DenoiserKind denoiser = DenoiserKind::identity;
  double soft_threshold_tau = 0.01;
  double tv_weight = 0.01;
  int tv_inner_iters = 20;
  std::shared_ptr<const Denoiser> custom_denoiser;  // overrides `denoiser` when set
  // Called after every completed iteration (post dual update, post halving
  // when one fired) with the live state. For tracing and equivalence checks.
  std::function<void(const struct SolverState&)> iterate_observer;
};

struct IterationRecord {
  int iter = 0;
  double step = 0.0;
  double primal_residual = 0.0;
  int basis_dim = 0;
};

struct Diagnostics {
  std::vector<IterationRecord> iterations;
  std::vector<int> halvings;  // iterations at which the basis was halved
  int final_basis_dim = 0;
  std::string stop_reason;    // "step_tolerance" | "divergence" | "max_iters"

  // Header "iter,step,primal_residual,basis_dim" plus one line per iteration.
  std::string to_csv() const;
};

struct SolverAbort : std::runtime_error {
  SolverAbort(const std::string& message, Diagnostics diag)
      : std::runtime_error(message), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

// Frequency-domain machinery for the padded forward operator projected
// through a spectral basis. Caches, per frequency bin, the dim x dim
// Hermitian factorization of (mu1 * B A^H A B^T + mu2 I), so the quadratic
// step reduces to independent small solves.
class OtfBlocks {
 public:
  OtfBlocks(const PsfStack&, const SpectralBasis&, const CropSpec&, double mu1, double mu2);

  const SpectralBasis& basis() const { return basis_; }
  int padded_height() const { return ph_; }
  int padded_width() const { return pw_; }
  int measurements() const { return n_; }
  int dim() const { return basis_.dim; }
  double mu1() const { return mu1_; }
  double mu2() const { return mu2_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(ph_) * pw_; }

  // Swap in a basis over the same channel grid (after halving) and rebuild
  // the projected planes and factorizations from the cached transfer functions.
  void set_basis(const SpectralBasis&);

  // y_i = sum_k (A B^T)_{ik} z_k on the padded grid (dim planes -> n planes).
  void apply_h(const double* coeff_planes, double* stack_planes) const;
  // Adjoint of apply_h (n planes -> dim planes).
  void apply_ht(const double* stack_planes, double* coeff_planes) const;
  // z = (mu1 H^T H + mu2 I)^{-1} rhs via the per-frequency factorizations.
  void solve_normal(const double* rhs_planes, double* coeff_planes) const;
  // Fused quadratic step: solve against H^T stack_rhs + field_rhs without the
  // intermediate spatial round-trip.
  void solve_z(const double* stack_rhs_planes, const double* field_rhs_planes,
               double* coeff_planes) const;

 private:
  void rebuild();

  int ph_, pw_, n_, c_;
  double mu1_, mu2_;
  SpectralBasis basis_;
  Fft2D fft_;
  std::vector<std::complex<double>> otf_;   // (i * c + j) transfer planes
  std::vector<std::complex<double>> g_;     // (i * dim + k) projected planes
  std::vector<std::complex<double>> chol_;  // per-bin lower Cholesky factors, bin-major
};

// Iterate bundle for one reconstruction. Coefficient state lives on the
// padded grid; v and xi hold one padded plane per measurement.
struct SolverState {
  CoefficientField z, u, eta;
  std::vector<double> v, xi;
  std::vector<double> hz;  // apply_h of the current z
  std::vector<double> step_history;
  int iteration = 0;
};

// Data-proximal step: averages the embedded measurements with the current
// model prediction inside the crop window, keeps the prediction outside.
std::vector<double> v_update(const FocalStack& y, const std::vector<double>& hz,
                             const std::vector<double>& xi, double mu1, const CropSpec&);

// Quadratic step: exact solve of the per-frequency normal equations.
CoefficientField z_update(const std::vector<double>& v, const std::vector<double>& xi,
                          const CoefficientField& u, const CoefficientField& eta,
                          const OtfBlocks&);

// Prior step: lift to image space, denoise channel-wise, project back.
CoefficientField u_update(const CoefficientField& z, const CoefficientField& eta,
                          const SpectralBasis&, const Denoiser&);

// Scaled dual ascent: xi += mu1 (v - Hz), eta += mu2 (u - z).
void dual_update(SolverState&, double mu1, double mu2);

struct ReconstructionResult {
  HyperspectralCube cube;
  Diagnostics diagnostics;
};

// Plug-and-play ADMM over the basis coefficients, with a one-shot adaptive
// basis-halving check. response_weights (when given) divide the lifted
// channels at the end, undoing a response applied during capture.
ReconstructionResult run_admm(const FocalStack&, const PsfStack&, const SpectralBasis&,
                              const SolverConfig&,
                              const std::vector<double>& response_weights = {});

// Three-stage hyperparameter search. Stage 1 walks a log grid, stage 2 a
// linear grid over the decade around the stage-1 winner, optional stage 3 a
// linear grid one stage-2 step around the stage-2 winner. Ties prefer the
// lexicographically smaller (mu1, mu2).
struct GridSearchOptions {
  double mu1_min = 1e-15, mu1_max = 1e-5;
  double mu2_min = 1e-15, mu2_max = 1e-5;
  bool stage3 = false;
};

struct GridPoint {
  int stage = 0;
  double mu1 = 0.0, mu2 = 0.0;
  double score = 0.0;
};

struct GridSearchResult {
  double mu1 = 0.0, mu2 = 0.0;
  double score = 0.0;
  std::vector<GridPoint> evaluations;  // every probe, in evaluation order
};

GridSearchResult grid_search(const std::function<double(double, double)>& objective,
                             const GridSearchOptions& = {});

}  // namespace csweep
