#pragma once

// Serial spatial-domain and dense-matrix mirrors of the transform stack.
// Slow by construction; the test suites and the benchmark harness compare
// the production kernels against these.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "csweep/basis.hpp"
#include "csweep/forward.hpp"
#include "csweep/solver.hpp"
#include "csweep/types.hpp"

namespace csweep::ref {

// Direct circular convolution on the zero-padded grid, one output pixel at a
// time. Same contract as apply_forward / apply_adjoint.
FocalStack apply_forward_naive(const HyperspectralCube&, const PsfStack&, const CropSpec&);
HyperspectralCube apply_adjoint_naive(const FocalStack&, const PsfStack&, const CropSpec&);

// Dense matrix of the crop-after-blur measurement operator. Rows scan
// (measurement, out row, out col); columns scan (channel, scene row, scene col).
Eigen::MatrixXd forward_matrix(const PsfStack&, const CropSpec&);

// Dense padded-grid operator in coefficient space: block (i, k) is
// sum_j B(k, j) Circ(g_ij), g_ij the kernel embedded at the origin with wrap.
// Rows scan (measurement, row, col); columns scan (basis vector, row, col).
Eigen::MatrixXd hhat_matrix(const PsfStack&, const SpectralBasis&, int padded_height,
                            int padded_width);

// mu1 * Hhat^T Hhat + mu2 * I, assembled from hhat_matrix.
Eigen::MatrixXd normal_matrix(const PsfStack&, const SpectralBasis&, int padded_height,
                              int padded_width, double mu1, double mu2);

struct DenseIterate {
  std::vector<double> z;  // padded coefficient planes after the iteration
  int basis_dim = 0;
  double step = 0.0;
};

struct DenseAdmmResult {
  HyperspectralCube cube;
  std::vector<DenseIterate> iterates;
  std::vector<int> halvings;
  std::string stop_reason;
};

// All-dense mirror of run_admm: identical update order, stop rules, and
// halving schedule, with the quadratic step solved by a dense factorization
// instead of per-frequency blocks.
DenseAdmmResult run_admm_dense(const FocalStack&, const PsfStack&, const SpectralBasis&,
                               const SolverConfig&);

struct JacobiEigen {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, n x n).
JacobiEigen jacobi_eigen(std::vector<double> matrix, int n);

// Two-pass direct-formula structural similarity, serial.
double ssim_direct(const HyperspectralCube&, const HyperspectralCube&);

// Ridge least squares against the dense measurement matrix; the recovery
// oracle for end-to-end gates. Unclamped.
HyperspectralCube dense_least_squares_recon(const FocalStack&, const PsfStack&, const CropSpec&,
                                            double ridge);

}  // namespace csweep::ref
