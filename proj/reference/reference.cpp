#include "reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "csweep/denoise.hpp"

namespace csweep::ref {

namespace {

inline int wrap(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

void check_forward_geometry(int scene_h, int scene_w, const PsfStack& psfs, const CropSpec& crop) {
  check_crop(crop);
  if (crop.padded_height != scene_h + psfs.kernel_size - 1 ||
      crop.padded_width != scene_w + psfs.kernel_size - 1)
    throw std::invalid_argument("reference: padded grid does not match scene and kernel size");
}

}  // namespace

FocalStack apply_forward_naive(const HyperspectralCube& cube, const PsfStack& psfs,
                               const CropSpec& crop) {
  require_valid(validate(cube), "apply_forward_naive");
  require_valid(validate(psfs), "apply_forward_naive");
  if (cube.channels != psfs.channels)
    throw std::invalid_argument("apply_forward_naive: channel counts differ");
  check_forward_geometry(cube.height, cube.width, psfs, crop);

  const int K = psfs.kernel_size, p = (K - 1) / 2;
  const int ph = crop.padded_height, pw = crop.padded_width;

  FocalStack out;
  out.height = crop.out_height;
  out.width = crop.out_width;
  out.count = psfs.count;
  out.lens_positions_mm = psfs.lens_positions_mm;
  out.data.assign(out.plane_size() * out.count, 0.0);

  for (int i = 0; i < psfs.count; ++i) {
    double* dst = out.plane(i);
    for (int r = 0; r < out.height; ++r)
      for (int c = 0; c < out.width; ++c) {
        const int m = r + crop.row_offset, n = c + crop.col_offset;
        double acc = 0.0;
        for (int j = 0; j < cube.channels; ++j) {
          const double* kern = psfs.kernel(i, j);
          const double* x = cube.plane(j);
          for (int a = 0; a < K; ++a) {
            int sr = wrap(m - a + p, ph) - p;  // source row on the unpadded scene
            if (sr < 0 || sr >= cube.height) continue;
            for (int b = 0; b < K; ++b) {
              int sc = wrap(n - b + p, pw) - p;
              if (sc < 0 || sc >= cube.width) continue;
              acc += kern[static_cast<std::size_t>(a) * K + b] *
                     x[static_cast<std::size_t>(sr) * cube.width + sc];
            }
          }
        }
        dst[static_cast<std::size_t>(r) * out.width + c] = acc;
      }
  }
  return out;
}

HyperspectralCube apply_adjoint_naive(const FocalStack& stack, const PsfStack& psfs,
                                      const CropSpec& crop) {
  require_valid(validate(stack), "apply_adjoint_naive");
  require_valid(validate(psfs), "apply_adjoint_naive");
  if (stack.count != psfs.count)
    throw std::invalid_argument("apply_adjoint_naive: measurement counts differ");
  if (stack.height != crop.out_height || stack.width != crop.out_width)
    throw std::invalid_argument("apply_adjoint_naive: stack does not match the crop window");
  const int scene_h = crop.padded_height - psfs.kernel_size + 1;
  const int scene_w = crop.padded_width - psfs.kernel_size + 1;
  check_forward_geometry(scene_h, scene_w, psfs, crop);

  const int K = psfs.kernel_size;
  const int ph = crop.padded_height, pw = crop.padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;

  // embed each measurement at the crop offset on the padded grid
  std::vector<double> embedded(plane * stack.count, 0.0);
  for (int i = 0; i < stack.count; ++i) {
    const double* src = stack.plane(i);
    double* dst = embedded.data() + static_cast<std::size_t>(i) * plane;
    for (int r = 0; r < stack.height; ++r)
      for (int c = 0; c < stack.width; ++c)
        dst[static_cast<std::size_t>(r + crop.row_offset) * pw + c + crop.col_offset] =
            src[static_cast<std::size_t>(r) * stack.width + c];
  }

  HyperspectralCube out;
  out.height = scene_h;
  out.width = scene_w;
  out.channels = psfs.channels;
  out.wavelengths_nm = psfs.wavelengths_nm;
  out.data.assign(out.plane_size() * out.channels, 0.0);

  for (int j = 0; j < psfs.channels; ++j) {
    double* dst = out.plane(j);
    for (int r = 0; r < scene_h; ++r)
      for (int c = 0; c < scene_w; ++c) {
        double acc = 0.0;
        for (int i = 0; i < stack.count; ++i) {
          const double* kern = psfs.kernel(i, j);
          const double* y = embedded.data() + static_cast<std::size_t>(i) * plane;
          for (int a = 0; a < K; ++a) {
            const int m = wrap(r + a, ph);
            for (int b = 0; b < K; ++b)
              acc += kern[static_cast<std::size_t>(a) * K + b] *
                     y[static_cast<std::size_t>(m) * pw + wrap(c + b, pw)];
          }
        }
        dst[static_cast<std::size_t>(r) * scene_w + c] = acc;
      }
  }
  return out;
}

Eigen::MatrixXd forward_matrix(const PsfStack& psfs, const CropSpec& crop) {
  require_valid(validate(psfs), "forward_matrix");
  check_crop(crop);
  const int K = psfs.kernel_size, p = (K - 1) / 2;
  const int ph = crop.padded_height, pw = crop.padded_width;
  const int scene_h = ph - K + 1, scene_w = pw - K + 1;
  if (scene_h < 1 || scene_w < 1)
    throw std::invalid_argument("forward_matrix: padded grid smaller than the kernel");

  const std::size_t out_plane = static_cast<std::size_t>(crop.out_height) * crop.out_width;
  const std::size_t scene_plane = static_cast<std::size_t>(scene_h) * scene_w;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(out_plane * psfs.count, scene_plane * psfs.channels);

  for (int i = 0; i < psfs.count; ++i)
    for (int r = 0; r < crop.out_height; ++r)
      for (int c = 0; c < crop.out_width; ++c) {
        const std::size_t row = static_cast<std::size_t>(i) * out_plane +
                                static_cast<std::size_t>(r) * crop.out_width + c;
        const int m = r + crop.row_offset, n = c + crop.col_offset;
        for (int j = 0; j < psfs.channels; ++j) {
          const double* kern = psfs.kernel(i, j);
          for (int a = 0; a < K; ++a) {
            int sr = wrap(m - a + p, ph) - p;
            if (sr < 0 || sr >= scene_h) continue;
            for (int b = 0; b < K; ++b) {
              int sc = wrap(n - b + p, pw) - p;
              if (sc < 0 || sc >= scene_w) continue;
              const std::size_t col = static_cast<std::size_t>(j) * scene_plane +
                                      static_cast<std::size_t>(sr) * scene_w + sc;
              mat(row, col) += kern[static_cast<std::size_t>(a) * K + b];
            }
          }
        }
      }
  return mat;
}

Eigen::MatrixXd hhat_matrix(const PsfStack& psfs, const SpectralBasis& basis, int padded_height,
                            int padded_width) {
  require_valid(validate(psfs), "hhat_matrix");
  require_valid(validate(basis), "hhat_matrix");
  if (basis.channels != psfs.channels)
    throw std::invalid_argument("hhat_matrix: channel counts differ");
  const int K = psfs.kernel_size, p = (K - 1) / 2;
  if (padded_height < K || padded_width < K)
    throw std::invalid_argument("hhat_matrix: padded grid smaller than the kernel");
  const int ph = padded_height, pw = padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(plane * psfs.count, plane * basis.dim);
  for (int i = 0; i < psfs.count; ++i)
    for (int k = 0; k < basis.dim; ++k)
      for (int j = 0; j < psfs.channels; ++j) {
        const double w = basis.at(k, j);
        const double* kern = psfs.kernel(i, j);
        for (int a = 0; a < K; ++a) {
          const int s = wrap(a - p, ph);
          for (int b = 0; b < K; ++b) {
            const int t = wrap(b - p, pw);
            const double val = w * kern[static_cast<std::size_t>(a) * K + b];
            if (val == 0.0) continue;
            for (int mr = 0; mr < ph; ++mr) {
              const int m = wrap(mr + s, ph);
              for (int nc = 0; nc < pw; ++nc) {
                const int n = wrap(nc + t, pw);
                mat(static_cast<std::size_t>(i) * plane + static_cast<std::size_t>(m) * pw + n,
                    static_cast<std::size_t>(k) * plane + static_cast<std::size_t>(mr) * pw + nc) +=
                    val;
              }
            }
          }
        }
      }
  return mat;
}

Eigen::MatrixXd normal_matrix(const PsfStack& psfs, const SpectralBasis& basis, int padded_height,
                              int padded_width, double mu1, double mu2) {
  Eigen::MatrixXd h = hhat_matrix(psfs, basis, padded_height, padded_width);
  Eigen::MatrixXd m = mu1 * (h.transpose() * h);
  m.diagonal().array() += mu2;
  return m;
}

namespace {

std::shared_ptr<const Denoiser> pick_denoiser_ref(const SolverConfig& cfg) {
  if (cfg.custom_denoiser) return cfg.custom_denoiser;
  switch (cfg.denoiser) {
    case DenoiserKind::identity:
      return make_identity_denoiser();
    case DenoiserKind::soft_threshold:
      return make_soft_threshold_denoiser(cfg.soft_threshold_tau);
    case DenoiserKind::total_variation:
      return make_tv_denoiser(cfg.tv_weight, cfg.tv_inner_iters);
  }
  throw std::invalid_argument("run_admm_dense: unknown denoiser kind");
}

double vec_norm(const Eigen::VectorXd& v) { return v.norm(); }

}  // namespace

DenseAdmmResult run_admm_dense(const FocalStack& stack, const PsfStack& psfs,
                               const SpectralBasis& basis, const SolverConfig& cfg) {
  require_valid(validate(stack), "run_admm_dense");
  require_valid(validate(psfs), "run_admm_dense");
  require_valid(validate(basis), "run_admm_dense");
  if (stack.count != psfs.count)
    throw std::invalid_argument("run_admm_dense: measurement counts differ");
  if (basis.channels != psfs.channels)
    throw std::invalid_argument("run_admm_dense: channel counts differ");
  if (!(cfg.mu1 > 0.0) || !(cfg.mu2 > 0.0))
    throw std::invalid_argument("run_admm_dense: mu1 and mu2 must be positive");

  std::shared_ptr<const Denoiser> denoiser = pick_denoiser_ref(cfg);
  const CropSpec crop = CropSpec::centered(stack.height, stack.width, psfs.kernel_size);
  const int ph = crop.padded_height, pw = crop.padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;
  const int n = stack.count, channels = psfs.channels;

  SpectralBasis cur = basis;
  Eigen::MatrixXd hmat = hhat_matrix(psfs, cur, ph, pw);
  Eigen::MatrixXd normal = cfg.mu1 * (hmat.transpose() * hmat);
  normal.diagonal().array() += cfg.mu2;
  Eigen::LDLT<Eigen::MatrixXd> fact(normal);

  Eigen::VectorXd z = Eigen::VectorXd::Constant(plane * cur.dim, 0.5);
  Eigen::VectorXd u = z;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(plane * cur.dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(plane * n);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(plane * n);
  Eigen::VectorXd hz = hmat * z;

  // measurements embedded on the padded grid plus an inside-the-window mask
  Eigen::VectorXd y_embed = Eigen::VectorXd::Zero(plane * n);
  std::vector<char> inside(plane, 0);
  for (int r = 0; r < stack.height; ++r)
    for (int c = 0; c < stack.width; ++c)
      inside[static_cast<std::size_t>(r + crop.row_offset) * pw + c + crop.col_offset] = 1;
  for (int i = 0; i < n; ++i) {
    const double* src = stack.plane(i);
    for (int r = 0; r < stack.height; ++r)
      for (int c = 0; c < stack.width; ++c)
        y_embed[static_cast<std::size_t>(i) * plane +
                static_cast<std::size_t>(r + crop.row_offset) * pw + c + crop.col_offset] =
            src[static_cast<std::size_t>(r) * stack.width + c];
  }

  auto lift_then_denoise_then_project = [&](const Eigen::VectorXd& coeff) {
    std::vector<double> image(plane * channels, 0.0);
    for (int j = 0; j < channels; ++j)
      for (int k = 0; k < cur.dim; ++k) {
        const double w = cur.at(k, j);
        for (std::size_t q = 0; q < plane; ++q)
          image[static_cast<std::size_t>(j) * plane + q] +=
              w * coeff[static_cast<std::size_t>(k) * plane + q];
      }
    denoiser->apply(image.data(), channels, ph, pw);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(plane * cur.dim);
    for (int k = 0; k < cur.dim; ++k)
      for (int j = 0; j < channels; ++j) {
        const double w = cur.at(k, j);
        for (std::size_t q = 0; q < plane; ++q)
          out[static_cast<std::size_t>(k) * plane + q] +=
              w * image[static_cast<std::size_t>(j) * plane + q];
      }
    return out;
  };

  DenseAdmmResult result;
  result.stop_reason = "max_iters";
  double prev_step = 0.0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    for (int i = 0; i < n; ++i)
      for (std::size_t q = 0; q < plane; ++q) {
        const std::size_t idx = static_cast<std::size_t>(i) * plane + q;
        double num = cfg.mu1 * hz[idx] - xi[idx];
        v[idx] = inside[q] ? (num + y_embed[idx]) / (1.0 + cfg.mu1) : num / cfg.mu1;
      }

    Eigen::VectorXd rhs =
        hmat.transpose() * (cfg.mu1 * v + xi) + (eta + cfg.mu2 * u);
    Eigen::VectorXd z_new = fact.solve(rhs);
    Eigen::VectorXd u_new = lift_then_denoise_then_project(z_new + eta);

    double z_norm = vec_norm(z);
    double step_num = vec_norm(z_new - z);
    double step = z_norm > 0.0 ? step_num / z_norm
                               : (step_num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

    z = z_new;
    u = u_new;
    hz = hmat * z;
    xi += cfg.mu1 * (v - hz);
    eta += cfg.mu2 * (u - z);

    bool halved_now = false;
    if (iter == cfg.halving_check_iter) {
      double u_norm = vec_norm(u);
      double mism = vec_norm(z - u);
      double rel = u_norm > 0.0 ? mism / u_norm
                                : (mism > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (rel > cfg.halving_threshold) {
        if (cur.dim == 1) throw std::runtime_error("run_admm_dense: halving requested at dim 1");
        cur = halve_basis(cur);
        const std::size_t keep = plane * cur.dim;
        z.conservativeResize(keep);
        u.conservativeResize(keep);
        eta.conservativeResize(keep);
        hmat = hhat_matrix(psfs, cur, ph, pw);
        normal = cfg.mu1 * (hmat.transpose() * hmat);
        normal.diagonal().array() += cfg.mu2;
        fact.compute(normal);
        hz = hmat * z;
        result.halvings.push_back(iter);
        halved_now = true;
      }
    }

    DenseIterate snap;
    snap.z.assign(z.data(), z.data() + z.size());
    snap.basis_dim = cur.dim;
    snap.step = step;
    result.iterates.push_back(std::move(snap));

    if (!halved_now) {
      if (step < cfg.step_tolerance) {
        result.stop_reason = "step_tolerance";
        break;
      }
      if (iter >= 2 && step > cfg.divergence_factor * prev_step) {
        result.stop_reason = "divergence";
        break;
      }
    }
    prev_step = step;
  }

  result.cube.height = stack.height;
  result.cube.width = stack.width;
  result.cube.channels = channels;
  result.cube.wavelengths_nm = psfs.wavelengths_nm;
  result.cube.data.assign(result.cube.plane_size() * channels, 0.0);
  const int p = (psfs.kernel_size - 1) / 2;
  for (int j = 0; j < channels; ++j) {
    double* dst = result.cube.plane(j);
    for (int r = 0; r < stack.height; ++r)
      for (int c = 0; c < stack.width; ++c) {
        double acc = 0.0;
        for (int k = 0; k < cur.dim; ++k)
          acc += cur.at(k, j) *
                 z[static_cast<std::size_t>(k) * plane + static_cast<std::size_t>(r + p) * pw +
                   c + p];
        dst[static_cast<std::size_t>(r) * stack.width + c] = acc < 0.0 ? 0.0 : acc;
      }
  }
  return result;
}

JacobiEigen jacobi_eigen(std::vector<double> matrix, int n) {
  if (n < 1 || matrix.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("jacobi_eigen: bad matrix shape");
  auto at = [&](int r, int c) -> double& { return matrix[static_cast<std::size_t>(r) * n + c]; };

  std::vector<double> vec(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) vec[static_cast<std::size_t>(i) * n + i] = 1.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(at(i, i)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) scale = std::max(scale, std::abs(at(i, j)));
  const double tol = scale > 0.0 ? 1e-14 * scale : 0.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
    if (off <= tol) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= tol) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = vec[static_cast<std::size_t>(k) * n + p];
          const double vkq = vec[static_cast<std::size_t>(k) * n + q];
          vec[static_cast<std::size_t>(k) * n + p] = c * vkp - s * vkq;
          vec[static_cast<std::size_t>(k) * n + q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return at(a, a) > at(b, b); });

  JacobiEigen out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    out.values[k] = at(order[k], order[k]);
    for (int i = 0; i < n; ++i)
      out.vectors[k][i] = vec[static_cast<std::size_t>(i) * n + order[k]];
  }
  return out;
}

double ssim_direct(const HyperspectralCube& recon, const HyperspectralCube& truth) {
  require_valid(validate(recon), "ssim_direct");
  require_valid(validate(truth), "ssim_direct");
  if (recon.height != truth.height || recon.width != truth.width ||
      recon.channels != truth.channels)
    throw std::invalid_argument("ssim_direct: cube shapes differ");
  constexpr int W = 11;
  if (recon.height < W || recon.width < W)
    throw std::invalid_argument("ssim_direct: image smaller than the 11x11 window");

  double win[W][W];
  double sum = 0.0;
  for (int a = 0; a < W; ++a)
    for (int b = 0; b < W; ++b) {
      const double dr = a - (W - 1) / 2, dc = b - (W - 1) / 2;
      win[a][b] = std::exp(-(dr * dr + dc * dc) / (2.0 * 1.5 * 1.5));
      sum += win[a][b];
    }
  for (int a = 0; a < W; ++a)
    for (int b = 0; b < W; ++b) win[a][b] /= sum;

  const double c1 = 1e-4, c2 = 9e-4;
  const int oh = recon.height - W + 1, ow = recon.width - W + 1;

  double total = 0.0;
  for (int ch = 0; ch < recon.channels; ++ch) {
    const double* x = recon.plane(ch);
    const double* y = truth.plane(ch);
    double acc = 0.0;
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        double mx = 0.0, my = 0.0;
        for (int a = 0; a < W; ++a)
          for (int b = 0; b < W; ++b) {
            mx += win[a][b] * x[static_cast<std::size_t>(r + a) * recon.width + c + b];
            my += win[a][b] * y[static_cast<std::size_t>(r + a) * recon.width + c + b];
          }
        double vx = 0.0, vy = 0.0, cov = 0.0;
        for (int a = 0; a < W; ++a)
          for (int b = 0; b < W; ++b) {
            const double dx = x[static_cast<std::size_t>(r + a) * recon.width + c + b] - mx;
            const double dy = y[static_cast<std::size_t>(r + a) * recon.width + c + b] - my;
            vx += win[a][b] * dx * dx;
            vy += win[a][b] * dy * dy;
            cov += win[a][b] * dx * dy;
          }
        acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    total += acc / (static_cast<double>(oh) * ow);
  }
  return total / recon.channels;
}

HyperspectralCube dense_least_squares_recon(const FocalStack& stack, const PsfStack& psfs,
                                            const CropSpec& crop, double ridge) {
  require_valid(validate(stack), "dense_least_squares_recon");
  require_valid(validate(psfs), "dense_least_squares_recon");
  if (stack.count != psfs.count)
    throw std::invalid_argument("dense_least_squares_recon: measurement counts differ");
  if (stack.height != crop.out_height || stack.width != crop.out_width)
    throw std::invalid_argument("dense_least_squares_recon: stack does not match the crop");
  if (!(ridge >= 0.0)) throw std::invalid_argument("dense_least_squares_recon: ridge must be >= 0");

  Eigen::MatrixXd m = forward_matrix(psfs, crop);
  Eigen::Map<const Eigen::VectorXd> y(stack.data.data(), stack.data.size());

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m.cols(), m.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  gram.diagonal().array() += ridge;
  Eigen::VectorXd x =
      gram.selfadjointView<Eigen::Lower>().ldlt().solve(m.transpose() * y);

  const int scene_h = crop.padded_height - psfs.kernel_size + 1;
  const int scene_w = crop.padded_width - psfs.kernel_size + 1;
  HyperspectralCube out;
  out.height = scene_h;
  out.width = scene_w;
  out.channels = psfs.channels;
  out.wavelengths_nm = psfs.wavelengths_nm;
  out.data.assign(x.data(), x.data() + x.size());
  return out;
}

}  // namespace csweep::ref
