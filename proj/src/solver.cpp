#include "csweep/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "csweep/numeric.hpp"

namespace csweep {

std::string Diagnostics::to_csv() const {
  std::string out = "iter,step,primal_residual,basis_dim\n";
  char buf[96];
  for (const auto& rec : iterations) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", rec.iter, rec.step,
                  rec.primal_residual, rec.basis_dim);
    out += buf;
  }
  return out;
}

OtfBlocks::OtfBlocks(const PsfStack& psfs, const SpectralBasis& basis, const CropSpec& crop,
                     double mu1, double mu2)
    : ph_(crop.padded_height),
      pw_(crop.padded_width),
      n_(psfs.count),
      c_(psfs.channels),
      mu1_(mu1),
      mu2_(mu2),
      basis_(basis),
      fft_(crop.padded_height, crop.padded_width) {
  require_valid(validate(psfs), "OtfBlocks");
  require_valid(validate(basis), "OtfBlocks");
  check_crop(crop);
  if (basis.channels != psfs.channels)
    throw std::invalid_argument("OtfBlocks: basis and kernel bank channel counts differ");
  if (!(mu1 >= 0.0) || !(mu2 > 0.0))
    throw std::invalid_argument("OtfBlocks: requires mu1 >= 0 and mu2 > 0");
  otf_ = compute_otfs(psfs, ph_, pw_);
  rebuild();
}

void OtfBlocks::set_basis(const SpectralBasis& basis) {
  require_valid(validate(basis), "OtfBlocks::set_basis");
  if (basis.channels != c_)
    throw std::invalid_argument("OtfBlocks::set_basis: channel count differs");
  basis_ = basis;
  rebuild();
}

void OtfBlocks::rebuild() {
  const std::size_t plane = plane_size();
  const int v = basis_.dim;

  // projected transfer planes: g_{ik} = sum_j B(k, j) A_{ij}
  g_.assign(plane * static_cast<std::size_t>(n_) * v, std::complex<double>(0.0, 0.0));
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < v; ++k) {
      std::complex<double>* dst = g_.data() + (static_cast<std::size_t>(i) * v + k) * plane;
      for (int j = 0; j < c_; ++j) {
        const double b = basis_.at(k, j);
        const std::complex<double>* src =
            otf_.data() + (static_cast<std::size_t>(i) * c_ + j) * plane;
        for (std::size_t q = 0; q < plane; ++q) dst[q] += b * src[q];
      }
    }

  // per-bin lower Cholesky of mu2 I + mu1 sum_i g_i g_i^H (built column-major)
  chol_.assign(plane * static_cast<std::size_t>(v) * v, std::complex<double>(0.0, 0.0));
  std::atomic<bool> not_spd{false};
#pragma omp parallel
  {
    std::vector<std::complex<double>> m(static_cast<std::size_t>(v) * v);
#pragma omp for schedule(static)
    for (long long f = 0; f < static_cast<long long>(plane); ++f) {
      for (int k = 0; k < v; ++k)
        for (int l = k; l < v; ++l) {
          std::complex<double> s(0.0, 0.0);
          for (int i = 0; i < n_; ++i) {
            std::complex<double> gik = g_[(static_cast<std::size_t>(i) * v + k) * plane + f];
            std::complex<double> gil = g_[(static_cast<std::size_t>(i) * v + l) * plane + f];
            s += std::conj(gil) * gik;  // lower entry (l, k)
          }
          s *= mu1_;
          if (l == k) s += mu2_;
          m[static_cast<std::size_t>(k) * v + l] = s;
        }
      // in-place Cholesky on the lower triangle
      bool ok = true;
      for (int k = 0; k < v && ok; ++k) {
        double d = m[static_cast<std::size_t>(k) * v + k].real();
        for (int t = 0; t < k; ++t) d -= std::norm(m[static_cast<std::size_t>(t) * v + k]);
        if (!(d > 0.0)) {
          ok = false;
          break;
        }
        double lkk = std::sqrt(d);
        m[static_cast<std::size_t>(k) * v + k] = lkk;
        for (int l = k + 1; l < v; ++l) {
          std::complex<double> s = m[static_cast<std::size_t>(k) * v + l];
          for (int t = 0; t < k; ++t)
            s -= m[static_cast<std::size_t>(t) * v + l] *
                 std::conj(m[static_cast<std::size_t>(t) * v + k]);
          m[static_cast<std::size_t>(k) * v + l] = s / lkk;
        }
      }
      if (!ok) {
        not_spd.store(true);
        continue;
      }
      std::copy(m.begin(), m.end(), chol_.begin() + static_cast<std::size_t>(f) * v * v);
    }
  }
  if (not_spd.load())
    throw std::runtime_error("OtfBlocks: a frequency block is not positive definite");
}

void OtfBlocks::apply_h(const double* coeff_planes, double* stack_planes) const {
  const std::size_t plane = plane_size();
  const int v = basis_.dim;
  std::vector<std::complex<double>> zhat(plane * v);
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
    for (int k = 0; k < v; ++k) {
      const double* src = coeff_planes + static_cast<std::size_t>(k) * plane;
      for (std::size_t q = 0; q < plane; ++q) buf[q] = src[q];
      fft_.forward(buf.data(), zhat.data() + static_cast<std::size_t>(k) * plane);
    }
  }
#pragma omp parallel
  {
    std::vector<std::complex<double>> acc(plane), spatial(plane);
#pragma omp for schedule(static)
    for (int i = 0; i < n_; ++i) {
      std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
      for (int k = 0; k < v; ++k) {
        const std::complex<double>* g = g_.data() + (static_cast<std::size_t>(i) * v + k) * plane;
        const std::complex<double>* z = zhat.data() + static_cast<std::size_t>(k) * plane;
        for (std::size_t q = 0; q < plane; ++q) acc[q] += g[q] * z[q];
      }
      fft_.inverse(acc.data(), spatial.data());
      double* dst = stack_planes + static_cast<std::size_t>(i) * plane;
      for (std::size_t q = 0; q < plane; ++q) dst[q] = spatial[q].real();
    }
  }
}

void OtfBlocks::apply_ht(const double* stack_planes, double* coeff_planes) const {
  const std::size_t plane = plane_size();
  const int v = basis_.dim;
  std::vector<std::complex<double>> what(plane * n_);
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
    for (int i = 0; i < n_; ++i) {
      const double* src = stack_planes + static_cast<std::size_t>(i) * plane;
      for (std::size_t q = 0; q < plane; ++q) buf[q] = src[q];
      fft_.forward(buf.data(), what.data() + static_cast<std::size_t>(i) * plane);
    }
  }
#pragma omp parallel
  {
    std::vector<std::complex<double>> acc(plane), spatial(plane);
#pragma omp for schedule(static)
    for (int k = 0; k < v; ++k) {
      std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
      for (int i = 0; i < n_; ++i) {
        const std::complex<double>* g = g_.data() + (static_cast<std::size_t>(i) * v + k) * plane;
        const std::complex<double>* w = what.data() + static_cast<std::size_t>(i) * plane;
        for (std::size_t q = 0; q < plane; ++q) acc[q] += std::conj(g[q]) * w[q];
      }
      fft_.inverse(acc.data(), spatial.data());
      double* dst = coeff_planes + static_cast<std::size_t>(k) * plane;
      for (std::size_t q = 0; q < plane; ++q) dst[q] = spatial[q].real();
    }
  }
}

namespace {

// forward/back substitution with the bin's lower Cholesky factor (column-major)
inline void solve_bin(const std::complex<double>* L, int v, std::complex<double>* b) {
  for (int k = 0; k < v; ++k) {
    std::complex<double> s = b[k];
    for (int t = 0; t < k; ++t) s -= L[static_cast<std::size_t>(t) * v + k] * b[t];
    b[k] = s / L[static_cast<std::size_t>(k) * v + k].real();
  }
  for (int k = v - 1; k >= 0; --k) {
    std::complex<double> s = b[k];
    for (int t = k + 1; t < v; ++t)
      s -= std::conj(L[static_cast<std::size_t>(k) * v + t]) * b[t];
    b[k] = s / L[static_cast<std::size_t>(k) * v + k].real();
  }
}

}  // namespace

void OtfBlocks::solve_z(const double* stack_rhs_planes, const double* field_rhs_planes,
                        double* coeff_planes) const {
  const std::size_t plane = plane_size();
  const int v = basis_.dim;

  std::vector<std::complex<double>> bhat(plane * v);
  {
    // H^T part: accumulate conj(g) .* FFT(stack rhs) into the v rhs planes
    std::vector<std::complex<double>> what(stack_rhs_planes ? plane * n_ : 0);
    if (stack_rhs_planes) {
#pragma omp parallel
      {
        std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
        for (int i = 0; i < n_; ++i) {
          const double* src = stack_rhs_planes + static_cast<std::size_t>(i) * plane;
          for (std::size_t q = 0; q < plane; ++q) buf[q] = src[q];
          fft_.forward(buf.data(), what.data() + static_cast<std::size_t>(i) * plane);
        }
      }
    }
#pragma omp parallel
    {
      std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
      for (int k = 0; k < v; ++k) {
        std::complex<double>* dst = bhat.data() + static_cast<std::size_t>(k) * plane;
        if (field_rhs_planes) {
          const double* src = field_rhs_planes + static_cast<std::size_t>(k) * plane;
          for (std::size_t q = 0; q < plane; ++q) buf[q] = src[q];
          fft_.forward(buf.data(), dst);
        } else {
          std::fill(dst, dst + plane, std::complex<double>(0.0, 0.0));
        }
        if (stack_rhs_planes) {
          for (int i = 0; i < n_; ++i) {
            const std::complex<double>* g =
                g_.data() + (static_cast<std::size_t>(i) * v + k) * plane;
            const std::complex<double>* w = what.data() + static_cast<std::size_t>(i) * plane;
            for (std::size_t q = 0; q < plane; ++q) dst[q] += std::conj(g[q]) * w[q];
          }
        }
      }
    }
  }

#pragma omp parallel
  {
    std::vector<std::complex<double>> b(v);
#pragma omp for schedule(static)
    for (long long f = 0; f < static_cast<long long>(plane); ++f) {
      for (int k = 0; k < v; ++k) b[k] = bhat[static_cast<std::size_t>(k) * plane + f];
      solve_bin(chol_.data() + static_cast<std::size_t>(f) * v * v, v, b.data());
      for (int k = 0; k < v; ++k) bhat[static_cast<std::size_t>(k) * plane + f] = b[k];
    }
  }

#pragma omp parallel
  {
    std::vector<std::complex<double>> spatial(plane);
#pragma omp for schedule(static)
    for (int k = 0; k < v; ++k) {
      fft_.inverse(bhat.data() + static_cast<std::size_t>(k) * plane, spatial.data());
      double* dst = coeff_planes + static_cast<std::size_t>(k) * plane;
      for (std::size_t q = 0; q < plane; ++q) dst[q] = spatial[q].real();
    }
  }
}

void OtfBlocks::solve_normal(const double* rhs_planes, double* coeff_planes) const {
  solve_z(nullptr, rhs_planes, coeff_planes);
}

std::vector<double> v_update(const FocalStack& y, const std::vector<double>& hz,
                             const std::vector<double>& xi, double mu1, const CropSpec& crop) {
  check_crop(crop);
  if (y.height != crop.out_height || y.width != crop.out_width)
    throw std::invalid_argument("v_update: measurements do not match the crop window");
  const std::size_t plane = static_cast<std::size_t>(crop.padded_height) * crop.padded_width;
  const int n = y.count;
  if (hz.size() != plane * n || xi.size() != plane * n)
    throw std::invalid_argument("v_update: padded plane count mismatch");
  if (!(mu1 > 0.0)) throw std::invalid_argument("v_update: mu1 must be positive");

  std::vector<double> v(plane * n);
  const int pw = crop.padded_width;
  for (int i = 0; i < n; ++i) {
    const double* hzp = hz.data() + static_cast<std::size_t>(i) * plane;
    const double* xip = xi.data() + static_cast<std::size_t>(i) * plane;
    const double* yp = y.plane(i);
    double* vp = v.data() + static_cast<std::size_t>(i) * plane;
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(plane); ++q) {
      int r = static_cast<int>(q / pw) - crop.row_offset;
      int c = static_cast<int>(q % pw) - crop.col_offset;
      double num = mu1 * hzp[q] - xip[q];
      if (r >= 0 && r < crop.out_height && c >= 0 && c < crop.out_width) {
        num += yp[static_cast<std::size_t>(r) * crop.out_width + c];
        vp[q] = num / (1.0 + mu1);
      } else {
        vp[q] = num / mu1;
      }
    }
  }
  return v;
}

CoefficientField z_update(const std::vector<double>& v, const std::vector<double>& xi,
                          const CoefficientField& u, const CoefficientField& eta,
                          const OtfBlocks& blocks) {
  const std::size_t plane = blocks.plane_size();
  const int n = blocks.measurements(), dim = blocks.dim();
  if (u.dim != dim || eta.dim != dim)
    throw std::invalid_argument("z_update: basis dimension mismatch with cached blocks");
  if (u.height != blocks.padded_height() || u.width != blocks.padded_width() ||
      eta.height != u.height || eta.width != u.width)
    throw std::invalid_argument("z_update: field shapes do not match the padded grid");
  if (v.size() != plane * n || xi.size() != plane * n)
    throw std::invalid_argument("z_update: auxiliary plane count mismatch");

  const double mu1 = blocks.mu1(), mu2 = blocks.mu2();
  std::vector<double> stack_rhs(plane * n), field_rhs(plane * dim);
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(plane * n); ++q)
    stack_rhs[q] = mu1 * v[q] + xi[q];
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(plane * dim); ++q)
    field_rhs[q] = eta.data[q] + mu2 * u.data[q];

  CoefficientField z;
  z.height = blocks.padded_height();
  z.width = blocks.padded_width();
  z.dim = dim;
  z.data.resize(plane * dim);
  blocks.solve_z(stack_rhs.data(), field_rhs.data(), z.data.data());
  return z;
}

CoefficientField u_update(const CoefficientField& z, const CoefficientField& eta,
                          const SpectralBasis& basis, const Denoiser& denoiser) {
  if (z.dim != basis.dim || eta.dim != basis.dim || z.height != eta.height ||
      z.width != eta.width)
    throw std::invalid_argument("u_update: shape mismatch");
  const std::size_t plane = z.plane_size();

  std::vector<double> shifted(plane * z.dim);
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(shifted.size()); ++q)
    shifted[q] = z.data[q] + eta.data[q];

  std::vector<double> image(plane * basis.channels);
  lift_planes(shifted.data(), plane, basis, image.data());
  denoiser.apply(image.data(), basis.channels, z.height, z.width);

  CoefficientField u;
  u.height = z.height;
  u.width = z.width;
  u.dim = z.dim;
  u.data.resize(plane * z.dim);
  project_planes(image.data(), plane, basis, u.data.data());
  return u;
}

void dual_update(SolverState& state, double mu1, double mu2) {
  if (state.v.size() != state.hz.size() || state.xi.size() != state.v.size())
    throw std::invalid_argument("dual_update: auxiliary shapes differ");
  if (state.u.data.size() != state.z.data.size() || state.eta.data.size() != state.z.data.size())
    throw std::invalid_argument("dual_update: field shapes differ");
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(state.xi.size()); ++q)
    state.xi[q] += mu1 * (state.v[q] - state.hz[q]);
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(state.eta.data.size()); ++q)
    state.eta.data[q] += mu2 * (state.u.data[q] - state.z.data[q]);
}

namespace {

std::shared_ptr<const Denoiser> pick_denoiser(const SolverConfig& cfg) {
  if (cfg.custom_denoiser) return cfg.custom_denoiser;
  switch (cfg.denoiser) {
    case DenoiserKind::identity:
      return make_identity_denoiser();
    case DenoiserKind::soft_threshold:
      return make_soft_threshold_denoiser(cfg.soft_threshold_tau);
    case DenoiserKind::total_variation:
      return make_tv_denoiser(cfg.tv_weight, cfg.tv_inner_iters);
  }
  throw std::invalid_argument("run_admm: unknown denoiser kind");
}

bool state_finite(const SolverState& state) {
  return all_finite(state.z.data) && all_finite(state.u.data) && all_finite(state.eta.data) &&
         all_finite(state.v) && all_finite(state.xi) && all_finite(state.hz);
}

std::vector<double> diff_buffer(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

ReconstructionResult run_admm(const FocalStack& stack, const PsfStack& psfs,
                              const SpectralBasis& basis, const SolverConfig& cfg,
                              const std::vector<double>& response_weights) {
  require_valid(validate(stack), "run_admm");
  require_valid(validate(psfs), "run_admm");
  require_valid(validate(basis), "run_admm");
  if (stack.count != psfs.count)
    throw std::invalid_argument("run_admm: stack and kernel bank measurement counts differ");
  if (basis.channels != psfs.channels)
    throw std::invalid_argument("run_admm: basis and kernel bank channel counts differ");
  if (!(cfg.mu1 > 0.0) || !(cfg.mu2 > 0.0))
    throw std::invalid_argument("run_admm: mu1 and mu2 must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("run_admm: max_iters must be at least 1");
  if (!(cfg.step_tolerance > 0.0))
    throw std::invalid_argument("run_admm: step_tolerance must be positive");
  if (!(cfg.divergence_factor >= 1.0))
    throw std::invalid_argument("run_admm: divergence_factor must be at least 1");
  if (!(cfg.halving_threshold > 0.0))
    throw std::invalid_argument("run_admm: halving_threshold must be positive");
  if (!response_weights.empty()) {
    if (static_cast<int>(response_weights.size()) != psfs.channels)
      throw std::invalid_argument("run_admm: response weight count mismatch");
    for (double w : response_weights)
      if (!(w > 0.0 && w <= 1.0))
        throw std::invalid_argument("run_admm: response weights must be in (0, 1]");
  }

  std::shared_ptr<const Denoiser> denoiser = pick_denoiser(cfg);
  const CropSpec crop = CropSpec::centered(stack.height, stack.width, psfs.kernel_size);
  OtfBlocks blocks(psfs, basis, crop, cfg.mu1, cfg.mu2);

  const std::size_t plane = blocks.plane_size();
  SolverState state;
  state.z.height = state.u.height = state.eta.height = crop.padded_height;
  state.z.width = state.u.width = state.eta.width = crop.padded_width;
  state.z.dim = state.u.dim = state.eta.dim = basis.dim;
  state.z.data.assign(plane * basis.dim, 0.5);
  state.u.data.assign(plane * basis.dim, 0.5);
  state.eta.data.assign(plane * basis.dim, 0.0);
  state.v.assign(plane * stack.count, 0.0);
  state.xi.assign(plane * stack.count, 0.0);
  state.hz.resize(plane * stack.count);
  blocks.apply_h(state.z.data.data(), state.hz.data());

  Diagnostics diag;
  diag.stop_reason = "max_iters";
  double prev_step = 0.0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    state.iteration = iter;
    state.v = v_update(stack, state.hz, state.xi, cfg.mu1, crop);
    CoefficientField z_new = z_update(state.v, state.xi, state.u, state.eta, blocks);
    CoefficientField u_new = u_update(z_new, state.eta, blocks.basis(), *denoiser);

    std::vector<double> dz = diff_buffer(z_new.data, state.z.data);
    double z_norm = l2_norm(state.z.data);
    double step_num = l2_norm(dz);
    double step = z_norm > 0.0 ? step_num / z_norm
                               : (step_num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

    state.z = std::move(z_new);
    state.u = std::move(u_new);
    blocks.apply_h(state.z.data.data(), state.hz.data());
    dual_update(state, cfg.mu1, cfg.mu2);

    std::vector<double> primal = diff_buffer(state.v, state.hz);
    double primal_residual = l2_norm(primal);

    diag.iterations.push_back({iter, step, primal_residual, blocks.dim()});
    state.step_history.push_back(step);

    if (!state_finite(state) || !std::isfinite(step) || !std::isfinite(primal_residual)) {
      diag.final_basis_dim = blocks.dim();
      std::ostringstream os;
      os << "run_admm: non-finite state at iteration " << iter;
      throw SolverAbort(os.str(), diag);
    }

    bool halved_now = false;
    if (iter == cfg.halving_check_iter) {
      std::vector<double> mism = diff_buffer(state.z.data, state.u.data);
      double u_norm = l2_norm(state.u.data);
      double rel = u_norm > 0.0 ? l2_norm(mism) / u_norm
                                : (l2_norm(mism) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (rel > cfg.halving_threshold) {
        if (blocks.dim() == 1) {
          diag.final_basis_dim = 1;
          throw SolverAbort("run_admm: basis halving requested at dim 1", diag);
        }
        SpectralBasis halved = halve_basis(blocks.basis());
        // the halved rows are a prefix, so re-projection truncates the planes
        const std::size_t keep = plane * halved.dim;
        state.z.data.resize(keep);
        state.u.data.resize(keep);
        state.eta.data.resize(keep);
        state.z.dim = state.u.dim = state.eta.dim = halved.dim;
        blocks.set_basis(halved);
        blocks.apply_h(state.z.data.data(), state.hz.data());
        diag.halvings.push_back(iter);
        halved_now = true;
      }
    }

    if (cfg.iterate_observer) cfg.iterate_observer(state);

    if (!halved_now) {
      if (step < cfg.step_tolerance) {
        diag.stop_reason = "step_tolerance";
        break;
      }
      if (iter >= 2 && step > cfg.divergence_factor * prev_step) {
        diag.stop_reason = "divergence";
        break;
      }
    }
    prev_step = step;
  }
  diag.final_basis_dim = blocks.dim();

  // lift the padded coefficients and keep the centered scene window
  std::vector<double> image(plane * psfs.channels);
  lift_planes(state.z.data.data(), plane, blocks.basis(), image.data());

  ReconstructionResult result;
  result.cube.height = stack.height;
  result.cube.width = stack.width;
  result.cube.channels = psfs.channels;
  result.cube.wavelengths_nm = psfs.wavelengths_nm;
  result.cube.data.resize(result.cube.plane_size() * psfs.channels);
  const int p = (psfs.kernel_size - 1) / 2;
  for (int j = 0; j < psfs.channels; ++j) {
    const double* src = image.data() + static_cast<std::size_t>(j) * plane;
    double w = response_weights.empty() ? 1.0 : response_weights[j];
    double* dst = result.cube.plane(j);
    for (int r = 0; r < stack.height; ++r)
      for (int c = 0; c < stack.width; ++c) {
        double x = src[static_cast<std::size_t>(r + p) * crop.padded_width + c + p] / w;
        dst[static_cast<std::size_t>(r) * stack.width + c] = x < 0.0 ? 0.0 : x;
      }
  }
  result.diagnostics = std::move(diag);
  return result;
}

namespace {

std::vector<double> log_axis(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
    throw std::invalid_argument("grid_search: ranges must satisfy 0 < min <= max");
  std::vector<double> nodes;
  for (double x = lo; x <= hi * (1.0 + 1e-9); x *= 10.0) nodes.push_back(x);
  return nodes;
}

std::vector<double> linear_axis(double center, bool fixed) {
  if (fixed) return {center};
  const double lo = center / std::sqrt(10.0), hi = center * std::sqrt(10.0);
  std::vector<double> nodes(9);
  for (int i = 0; i < 9; ++i) nodes[i] = lo + (hi - lo) * i / 8.0;
  return nodes;
}

std::vector<double> refine_axis(double center, double step, bool fixed) {
  if (fixed || step == 0.0) return {center};
  double lo = center - step;
  if (lo <= 0.0) lo = std::numeric_limits<double>::min();
  double hi = center + step;
  std::vector<double> nodes(9);
  for (int i = 0; i < 9; ++i) nodes[i] = lo + (hi - lo) * i / 8.0;
  return nodes;
}

}  // namespace

GridSearchResult grid_search(const std::function<double(double, double)>& objective,
                             const GridSearchOptions& opts) {
  GridSearchResult result;
  bool have_best = false;

  auto sweep = [&](int stage, const std::vector<double>& axis1, const std::vector<double>& axis2,
                   double& best1, double& best2, bool& have_stage_best) {
    double stage_score = 0.0;
    have_stage_best = false;
    for (double m1 : axis1) {
      for (double m2 : axis2) {
        double score = objective(m1, m2);
        result.evaluations.push_back({stage, m1, m2, score});
        if (!std::isfinite(score)) continue;
        if (!have_stage_best || score > stage_score) {
          have_stage_best = true;
          stage_score = score;
          best1 = m1;
          best2 = m2;
        }
        if (!have_best || score > result.score) {
          have_best = true;
          result.score = score;
          result.mu1 = m1;
          result.mu2 = m2;
        }
      }
    }
  };

  const std::vector<double> axis1 = log_axis(opts.mu1_min, opts.mu1_max);
  const std::vector<double> axis2 = log_axis(opts.mu2_min, opts.mu2_max);
  const bool fixed1 = axis1.size() == 1, fixed2 = axis2.size() == 1;

  double w1 = 0.0, w2 = 0.0;
  bool stage_ok = false;
  sweep(1, axis1, axis2, w1, w2, stage_ok);
  if (!stage_ok) throw std::runtime_error("grid_search: objective non-finite on the whole stage-1 grid");

  const std::vector<double> fine1 = linear_axis(w1, fixed1);
  const std::vector<double> fine2 = linear_axis(w2, fixed2);
  double r1 = w1, r2 = w2;
  bool stage2_ok = false;
  sweep(2, fine1, fine2, r1, r2, stage2_ok);
  if (!stage2_ok) {
    r1 = w1;
    r2 = w2;
  }

  if (opts.stage3) {
    double step1 = fine1.size() > 1 ? fine1[1] - fine1[0] : 0.0;
    double step2 = fine2.size() > 1 ? fine2[1] - fine2[0] : 0.0;
    double t1 = r1, t2 = r2;
    bool stage3_ok = false;
    sweep(3, refine_axis(r1, step1, fixed1), refine_axis(r2, step2, fixed2), t1, t2, stage3_ok);
  }
  return result;
}

}  // namespace csweep
