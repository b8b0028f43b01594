// Manual one-time tool: dense least-squares recovery values for the fixed
// end-to-end gate instance in recovery_gate_instance.hpp. Builds the dense
// measurement operator over padded basis-coefficient space, then reports the
// reconstruction quality of
//   (a) the least-squares solution anchored at the solver's 0.5-constant
//       init (the limit of an iterative least-squares run started there) —
//       this is the number frozen as gate::kOraclePsnrDb, and
//   (b) the minimum-norm least-squares solution, for reference.
// The decomposition takes minutes; the tool is not part of the test suite.

#include <cstdio>
#include <vector>

#include <Eigen/Dense>

#include "csweep/basis.hpp"
#include "csweep/forward.hpp"
#include "csweep/metrics.hpp"
#include "csweep/types.hpp"
#include "recovery_gate_instance.hpp"
#include "reference.hpp"

using namespace csweep;

int main() {
  setvbuf(stdout, nullptr, _IOLBF, 0);
  const HyperspectralCube scene = gate::make_scene();
  const PsfStack bank = gate::make_bank();
  const SpectralBasis basis = gate::make_basis();
  const int h = scene.height, w = scene.width;
  const CropSpec crop = CropSpec::centered(h, w, bank.kernel_size);
  const FocalStack y = apply_forward(scene, bank, crop);

  const int ph = crop.padded_height, pw = crop.padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;
  const int pad = (bank.kernel_size - 1) / 2;
  std::printf("instance: %dx%dx%d, %d measurements, kernel %d, padded %dx%d\n", h, w,
              scene.channels, bank.count, bank.kernel_size, ph, pw);

  // Dense operator rows only for the pixels the sensor keeps.
  const Eigen::MatrixXd full = ref::hhat_matrix(bank, basis, ph, pw);
  Eigen::MatrixXd a(static_cast<std::size_t>(bank.count) * h * w, full.cols());
  Eigen::VectorXd rhs(a.rows());
  {
    std::size_t q = 0;
    for (int i = 0; i < bank.count; ++i)
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c, ++q) {
          a.row(q) = full.row(i * plane + (r + pad) * pw + (c + pad));
          rhs(q) = y.at(i, r, c);
        }
  }

  const auto report = [&](const Eigen::VectorXd& z, const char* tag) {
    CoefficientField field;
    field.height = h;
    field.width = w;
    field.dim = basis.dim;
    field.data.resize(static_cast<std::size_t>(basis.dim) * h * w);
    for (int k = 0; k < basis.dim; ++k)
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
          field.plane(k)[static_cast<std::size_t>(r) * w + c] =
              z[k * plane + (r + pad) * static_cast<std::size_t>(pw) + c + pad];
    HyperspectralCube recon = lift(field, basis, scene.wavelengths_nm);
    for (double& t : recon.data) t = t < 0.0 ? 0.0 : t;
    std::printf("%-28s residual %.3e  psnr %.4f dB\n", tag,
                (a * z - rhs).norm() / rhs.norm(), psnr(recon, scene));
  };

  std::printf("decomposing %ld x %ld ...\n", static_cast<long>(a.rows()),
              static_cast<long>(a.cols()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);

  const Eigen::VectorXd init = Eigen::VectorXd::Constant(a.cols(), 0.5);
  report(init + cod.solve(rhs - a * init), "anchored at 0.5 init");
  report(cod.solve(rhs), "minimum norm");
  return 0;
}
