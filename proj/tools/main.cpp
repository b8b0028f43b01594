// csweep: simulate a chromatic focal-sweep capture and reconstruct
// hyperspectral cubes from the resulting grayscale stacks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csweep/basis.hpp"
#include "csweep/forward.hpp"
#include "csweep/io.hpp"
#include "csweep/metrics.hpp"
#include "csweep/optics.hpp"
#include "csweep/solver.hpp"
#include "csweep/threads.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitInvalid = 2;

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

// "start:stop:step" (inclusive endpoints when step divides the span) or a
// comma-separated list.
std::vector<double> parse_wavelengths(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_double_list(text, "--wavelengths");
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() != 3) throw std::invalid_argument("--wavelengths: expected start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start)
    throw std::invalid_argument("--wavelengths: need stop >= start and step > 0");
  std::vector<double> out;
  for (double w = start; w <= stop + 1e-9 * step; w += step) out.push_back(w);
  return out;
}

std::vector<int> parse_int_triple(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.size() != 3) throw std::invalid_argument(std::string(what) + ": expected i,j,k");
  return out;
}

csweep::DenoiserKind parse_denoiser(const std::string& name) {
  if (name == "identity") return csweep::DenoiserKind::identity;
  if (name == "l1") return csweep::DenoiserKind::soft_threshold;
  if (name == "tv") return csweep::DenoiserKind::total_variation;
  throw std::invalid_argument("--denoiser: expected identity, l1, or tv");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw csweep::IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw csweep::IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// make-psfs

struct MakePsfsArgs {
  std::string lens1, lens2, out;
  std::string wavelengths_text, positions_text;
  int count = 0;
  double separation_mm = 0.0;
  double aperture_number = 8.0;
  double pixel_pitch_um = 5.86;
  double scene_distance_m = 2.8;
  double reference_wavelength_nm = 550.0;
  int max_kernel_px = 63;
};

int run_make_psfs(const MakePsfsArgs& a) {
  csweep::OpticalConfig cfg;
  cfg.lens1 = csweep::read_dispersion_csv(a.lens1);
  cfg.lens2 = csweep::read_dispersion_csv(a.lens2);
  cfg.separation_mm = a.separation_mm;
  cfg.aperture_number = a.aperture_number;
  cfg.pixel_pitch_um = a.pixel_pitch_um;
  cfg.scene_distance_m = a.scene_distance_m;
  cfg.reference_wavelength_nm = a.reference_wavelength_nm;
  cfg.max_kernel_px = a.max_kernel_px;

  std::vector<double> wavelengths = parse_wavelengths(a.wavelengths_text);
  std::vector<double> shifts = csweep::focal_shift_curve(cfg, wavelengths);

  std::vector<double> positions;
  if (!a.positions_text.empty()) {
    positions = parse_double_list(a.positions_text, "--positions");
  } else {
    if (a.count < 1) throw std::invalid_argument("make-psfs: need --n >= 1 or --positions");
    positions = csweep::select_lens_positions(shifts, a.count);
  }

  csweep::PsfStack psfs = csweep::build_psf_stack(cfg, positions, wavelengths);
  csweep::write_psfs(a.out, psfs);

  const auto [lo, hi] = std::minmax_element(shifts.begin(), shifts.end());
  std::cout << "focal shift range: [" << fmt_short(*lo) << ", " << fmt_short(*hi) << "] mm over "
            << wavelengths.size() << " bands\n";
  std::cout << "lens positions (mm):";
  for (double p : positions) std::cout << ' ' << fmt_short(p);
  std::cout << "\nkernel size: " << psfs.kernel_size << " px\nwrote " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// make-basis

struct MakeBasisArgs {
  std::vector<std::string> training;
  std::string out;
  int dim = 0;
};

int run_make_basis(const MakeBasisArgs& a) {
  std::vector<csweep::HyperspectralCube> cubes;
  cubes.reserve(a.training.size());
  for (const std::string& path : a.training) cubes.push_back(csweep::read_cube(path));
  csweep::SpectralBasis basis = csweep::compute_basis(cubes, a.dim);
  csweep::write_basis_csv(a.out, basis);
  std::cout << "basis " << basis.dim << " x " << basis.channels << " from " << cubes.size()
            << " cube(s)\nwrote " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scene, psfs, out;
  double photon_flux = 7.5e17;
  double exposure_s = 5.0;
  double pixel_area_m2 = 3.434e-11;
  double efficiency = 0.196;
  std::uint64_t seed = 0;
  int expect_count = 0;  // optional sanity check against the kernel bank
  bool no_noise = false;
};

int run_simulate(const SimulateArgs& a) {
  csweep::HyperspectralCube scene = csweep::read_cube(a.scene);
  csweep::PsfStack psfs = csweep::read_psfs(a.psfs);
  if (a.expect_count > 0 && a.expect_count != psfs.count)
    throw std::invalid_argument("simulate: --n disagrees with the kernel bank (" +
                                std::to_string(psfs.count) + " positions)");
  const csweep::CropSpec crop =
      csweep::CropSpec::centered(scene.height, scene.width, psfs.kernel_size);

  csweep::FocalStack stack;
  csweep::Metadata md;
  md.emplace_back("command", "simulate");
  md.emplace_back("scene", a.scene);
  md.emplace_back("psfs", a.psfs);
  if (a.no_noise) {
    stack = csweep::apply_forward(scene, psfs, crop);
    md.emplace_back("noise", "none");
  } else {
    csweep::ExposureModel model;
    model.photon_flux = a.photon_flux;
    model.total_exposure_s = a.exposure_s;
    model.pixel_area_m2 = a.pixel_area_m2;
    model.light_efficiency = a.efficiency;
    model.seed = a.seed;
    stack = csweep::simulate_measurement(scene, psfs, crop, model);
    md.emplace_back("noise", "poisson");
    md.emplace_back("photon_flux", fmt_g(a.photon_flux));
    md.emplace_back("exposure_s", fmt_g(a.exposure_s));
    md.emplace_back("pixel_area_m2", fmt_g(a.pixel_area_m2));
    md.emplace_back("light_efficiency", fmt_g(a.efficiency));
    md.emplace_back("seed", std::to_string(a.seed));
  }
  csweep::write_stack(a.out, stack, md);
  std::cout << "stack " << stack.count << " x " << stack.height << " x " << stack.width
            << (a.no_noise ? " (clean)" : " (poisson)") << "\nwrote " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructArgs {
  std::string stack, psfs, basis, out, diagnostics;
  csweep::SolverConfig solver;
  std::string denoiser_name = "identity";
};

int run_reconstruct(const ReconstructArgs& a) {
  csweep::FocalStack stack = csweep::read_stack(a.stack);
  csweep::PsfStack psfs = csweep::read_psfs(a.psfs);
  csweep::SpectralBasis basis = csweep::read_basis_csv(a.basis);

  csweep::SolverConfig cfg = a.solver;
  cfg.denoiser = parse_denoiser(a.denoiser_name);

  const std::string diag_path =
      a.diagnostics.empty() ? a.out + ".diag.csv" : a.diagnostics;

  csweep::ReconstructionResult result;
  try {
    result = csweep::run_admm(stack, psfs, basis, cfg);
  } catch (const csweep::SolverAbort& abort) {
    write_text_file(diag_path, abort.diagnostics.to_csv());
    std::cerr << "solver abort: " << abort.what() << "\ndiagnostics: " << diag_path << "\n";
    return kExitSolver;
  }

  csweep::Metadata md;
  md.emplace_back("command", "reconstruct");
  md.emplace_back("stack", a.stack);
  md.emplace_back("psfs", a.psfs);
  md.emplace_back("basis", a.basis);
  md.emplace_back("mu1", fmt_g(cfg.mu1));
  md.emplace_back("mu2", fmt_g(cfg.mu2));
  md.emplace_back("denoiser", a.denoiser_name);
  md.emplace_back("iterations", std::to_string(result.diagnostics.iterations.size()));
  md.emplace_back("stop_reason", result.diagnostics.stop_reason);
  md.emplace_back("final_basis_dim", std::to_string(result.diagnostics.final_basis_dim));
  csweep::write_cube(a.out, result.cube, md);
  write_text_file(diag_path, result.diagnostics.to_csv());

  const auto& iters = result.diagnostics.iterations;
  std::cout << "iterations: " << iters.size() << " (" << result.diagnostics.stop_reason
            << "), final step " << fmt_short(iters.empty() ? 0.0 : iters.back().step)
            << ", basis dim " << result.diagnostics.final_basis_dim << "\nwrote " << a.out
            << "\ndiagnostics: " << diag_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tune

struct TuneArgs {
  std::string stack, truth, psfs, basis, log_path = "tune_log.csv";
  csweep::GridSearchOptions options;
  int max_iters = 9;
  std::string denoiser_name = "identity";
};

int run_tune(const TuneArgs& a) {
  csweep::FocalStack stack = csweep::read_stack(a.stack);
  csweep::HyperspectralCube truth = csweep::read_cube(a.truth);
  csweep::PsfStack psfs = csweep::read_psfs(a.psfs);
  csweep::SpectralBasis basis = csweep::read_basis_csv(a.basis);
  if (truth.height != stack.height || truth.width != stack.width)
    throw std::invalid_argument("tune: truth cube and stack differ in spatial size");

  csweep::SolverConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.denoiser = parse_denoiser(a.denoiser_name);

  auto objective = [&](double mu1, double mu2) -> double {
    csweep::SolverConfig probe = cfg;
    probe.mu1 = mu1;
    probe.mu2 = mu2;
    try {
      csweep::ReconstructionResult r = csweep::run_admm(stack, psfs, basis, probe);
      return csweep::psnr(r.cube, truth);
    } catch (const csweep::SolverAbort&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  csweep::GridSearchResult result = csweep::grid_search(objective, a.options);

  std::string log = "stage,mu1,mu2,psnr\n";
  for (const auto& e : result.evaluations)
    log += std::to_string(e.stage) + "," + fmt_g(e.mu1) + "," + fmt_g(e.mu2) + "," +
           fmt_g(e.score) + "\n";
  write_text_file(a.log_path, log);

  std::cout << "best mu1 " << fmt_g(result.mu1) << ", mu2 " << fmt_g(result.mu2) << " (psnr "
            << fmt_short(result.score) << " dB over " << result.evaluations.size()
            << " probes)\nlog: " << a.log_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string recon, truth, out, rgb_prefix;
  std::string metrics_text = "psnr,ssim,sam,de00";
  std::string compose_text, compose_stack, compose_out = "compose.ppm";
  std::string white_patch_text;
};

int run_evaluate(const EvaluateArgs& a) {
  std::vector<std::string> names;
  {
    std::stringstream ss(a.metrics_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  for (const std::string& n : names)
    if (n != "psnr" && n != "ssim" && n != "sam" && n != "de00")
      throw std::invalid_argument("evaluate: unknown metric '" + n + "'");

  csweep::HyperspectralCube recon = csweep::read_cube(a.recon);
  csweep::HyperspectralCube truth = csweep::read_cube(a.truth);

  std::string csv = "metric,value\n";
  for (const std::string& n : names) {
    double value = 0.0;
    if (n == "psnr") value = csweep::psnr(recon, truth);
    else if (n == "ssim") value = csweep::ssim(recon, truth);
    else if (n == "sam") value = csweep::sam_degrees(recon, truth);
    else value = csweep::delta_e00_mean(recon, truth);
    std::cout << n << " = " << fmt_g(value) << "\n";
    csv += n + "," + fmt_g(value) + "\n";
  }
  if (!a.out.empty()) write_text_file(a.out, csv);

  if (!a.rgb_prefix.empty()) {
    csweep::write_ppm(a.rgb_prefix + "_recon.ppm", csweep::hsi_to_rgb(recon));
    csweep::write_ppm(a.rgb_prefix + "_truth.ppm", csweep::hsi_to_rgb(truth));
    std::cout << "rgb: " << a.rgb_prefix << "_recon.ppm, " << a.rgb_prefix << "_truth.ppm\n";
  }

  if (!a.compose_text.empty()) {
    if (a.compose_stack.empty())
      throw std::invalid_argument("evaluate: --compose-rgb needs --stack");
    std::vector<int> idx = parse_int_triple(a.compose_text, "--compose-rgb");
    csweep::FocalStack stack = csweep::read_stack(a.compose_stack);
    std::optional<csweep::PatchRect> patch;
    if (!a.white_patch_text.empty()) {
      std::vector<double> p = parse_double_list(a.white_patch_text, "--white-patch");
      if (p.size() != 4) throw std::invalid_argument("--white-patch: expected row,col,height,width");
      patch = csweep::PatchRect{static_cast<int>(p[0]), static_cast<int>(p[1]),
                                static_cast<int>(p[2]), static_cast<int>(p[3])};
    }
    csweep::RgbImage img = csweep::compose_rgb_from_stack(stack, idx[0], idx[1], idx[2], patch);
    csweep::write_ppm(a.compose_out, img);
    std::cout << "composed rgb: " << a.compose_out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// info

int run_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw csweep::IoError("cannot open '" + path + "'");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (in.gcount() != 4) throw csweep::IoError("truncated file '" + path + "': needed 4 bytes at offset 0");
  in.close();
  const std::string tag(magic, 4);

  if (tag == "HSC1") {
    csweep::Metadata md;
    csweep::HyperspectralCube cube = csweep::read_cube(path, &md);
    std::cout << "HSC1 H=" << cube.height << " W=" << cube.width << " C=" << cube.channels << "\n";
    std::cout << "wavelengths_nm:";
    for (double w : cube.wavelengths_nm) std::cout << ' ' << fmt_short(w);
    std::cout << "\n";
    for (const auto& [k, v] : md) std::cout << k << "=" << v << "\n";
    return kExitOk;
  }
  if (tag == "FST1") {
    csweep::Metadata md;
    csweep::FocalStack stack = csweep::read_stack(path, &md);
    std::cout << "FST1 H=" << stack.height << " W=" << stack.width << " N=" << stack.count << "\n";
    std::cout << "lens_positions_mm:";
    for (double p : stack.lens_positions_mm) std::cout << ' ' << fmt_short(p);
    std::cout << "\n";
    for (const auto& [k, v] : md) std::cout << k << "=" << v << "\n";
    return kExitOk;
  }
  if (tag == "PSF1") {
    csweep::PsfStack psfs = csweep::read_psfs(path);
    std::cout << "PSF1 N=" << psfs.count << " C=" << psfs.channels << " K=" << psfs.kernel_size
              << "\n";
    std::cout << "lens_positions_mm:";
    for (double p : psfs.lens_positions_mm) std::cout << ' ' << fmt_short(p);
    std::cout << "\nwavelengths_nm:";
    for (double w : psfs.wavelengths_nm) std::cout << ' ' << fmt_short(w);
    std::cout << "\n";
    return kExitOk;
  }
  throw csweep::IoError("unrecognized magic in '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chromatic focal-sweep hyperspectral camera toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (0 = hardware default)")
      ->capture_default_str();

  // make-psfs ---------------------------------------------------------------
  MakePsfsArgs mp;
  CLI::App* make_psfs = app.add_subcommand("make-psfs", "synthesize a defocus kernel bank");
  make_psfs->set_config("--config");
  make_psfs->add_option("--lens1", mp.lens1, "front lens dispersion CSV")->required();
  make_psfs->add_option("--lens2", mp.lens2, "rear lens dispersion CSV")->required();
  make_psfs->add_option("--wavelengths", mp.wavelengths_text,
                        "band grid: start:stop:step or comma list (nm)")
      ->required();
  make_psfs->add_option("--n", mp.count, "number of sweep positions (even spacing in shift)");
  make_psfs->add_option("--positions", mp.positions_text, "explicit lens positions (mm, comma list)");
  make_psfs->add_option("--separation", mp.separation_mm, "lens separation (mm)")
      ->capture_default_str();
  make_psfs->add_option("--aperture", mp.aperture_number, "f-number")->capture_default_str();
  make_psfs->add_option("--pixel-pitch", mp.pixel_pitch_um, "sensor pitch (um)")
      ->capture_default_str();
  make_psfs->add_option("--scene-distance", mp.scene_distance_m, "subject distance (m)")
      ->capture_default_str();
  make_psfs->add_option("--reference-wavelength", mp.reference_wavelength_nm,
                        "in-focus wavelength (nm)")
      ->capture_default_str();
  make_psfs->add_option("--max-kernel", mp.max_kernel_px, "largest allowed kernel (px)")
      ->capture_default_str();
  make_psfs->add_option("--out", mp.out, "output PSF1 file")->required();

  // make-basis --------------------------------------------------------------
  MakeBasisArgs mb;
  CLI::App* make_basis = app.add_subcommand("make-basis", "fit a spectral basis to training cubes");
  make_basis->set_config("--config");
  make_basis->add_option("--training", mb.training, "training cube file(s)")
      ->required()
      ->expected(-1);
  make_basis->add_option("--dim", mb.dim, "number of basis vectors")->required();
  make_basis->add_option("--out", mb.out, "output basis CSV")->required();

  // simulate ----------------------------------------------------------------
  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "render a focal stack from a scene cube");
  simulate->set_config("--config");
  simulate->add_option("--scene", sim.scene, "input HSC1 cube")->required();
  simulate->add_option("--psfs", sim.psfs, "PSF1 kernel bank")->required();
  simulate->add_option("--photon-flux", sim.photon_flux, "photons per m^2 per s")
      ->capture_default_str();
  simulate->add_option("--exposure", sim.exposure_s, "total sweep exposure (s)")
      ->capture_default_str();
  simulate->add_option("--pixel-area", sim.pixel_area_m2, "pixel area (m^2)")
      ->capture_default_str();
  simulate->add_option("--efficiency", sim.efficiency, "per-exposure light efficiency")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "noise seed")->capture_default_str();
  simulate->add_option("--n", sim.expect_count, "expected sweep length (checked against the bank)");
  simulate->add_flag("--no-noise", sim.no_noise, "skip photon noise; output the clean projection");
  simulate->add_option("--out", sim.out, "output FST1 file")->required();

  // reconstruct ---------------------------------------------------------------
  ReconstructArgs rec;
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "recover a cube from a focal stack");
  reconstruct->set_config("--config");
  reconstruct->add_option("--stack", rec.stack, "input FST1 stack")->required();
  reconstruct->add_option("--psfs", rec.psfs, "PSF1 kernel bank")->required();
  reconstruct->add_option("--basis", rec.basis, "spectral basis CSV")->required();
  reconstruct->add_option("--mu1", rec.solver.mu1, "data-term weight")->capture_default_str();
  reconstruct->add_option("--mu2", rec.solver.mu2, "prior-term weight")->capture_default_str();
  reconstruct->add_option("--max-iters", rec.solver.max_iters, "iteration cap")
      ->capture_default_str();
  reconstruct->add_option("--step-tol", rec.solver.step_tolerance, "relative step stop threshold")
      ->capture_default_str();
  reconstruct->add_option("--divergence", rec.solver.divergence_factor,
                          "stop when step grows by this factor")
      ->capture_default_str();
  reconstruct->add_option("--halving-iter", rec.solver.halving_check_iter,
                          "iteration of the basis shrink test")
      ->capture_default_str();
  reconstruct->add_option("--halving-threshold", rec.solver.halving_threshold,
                          "z/u disagreement that triggers the shrink")
      ->capture_default_str();
  reconstruct->add_option("--denoiser", rec.denoiser_name, "identity | l1 | tv")
      ->capture_default_str();
  reconstruct->add_option("--tau", rec.solver.soft_threshold_tau, "l1 shrink amount")
      ->capture_default_str();
  reconstruct->add_option("--tv-weight", rec.solver.tv_weight, "tv strength")
      ->capture_default_str();
  reconstruct->add_option("--tv-iters", rec.solver.tv_inner_iters, "tv inner iterations")
      ->capture_default_str();
  reconstruct->add_option("--out", rec.out, "output HSC1 cube")->required();
  reconstruct->add_option("--diagnostics", rec.diagnostics,
                          "iteration log CSV (default <out>.diag.csv)");

  // tune ----------------------------------------------------------------------
  TuneArgs tune;
  CLI::App* tune_cmd = app.add_subcommand("tune", "grid-search mu1/mu2 against a truth cube");
  tune_cmd->set_config("--config");
  tune_cmd->add_option("--stack", tune.stack, "input FST1 stack")->required();
  tune_cmd->add_option("--truth", tune.truth, "ground-truth HSC1 cube")->required();
  tune_cmd->add_option("--psfs", tune.psfs, "PSF1 kernel bank")->required();
  tune_cmd->add_option("--basis", tune.basis, "spectral basis CSV")->required();
  tune_cmd->add_option("--mu1-min", tune.options.mu1_min, "")->capture_default_str();
  tune_cmd->add_option("--mu1-max", tune.options.mu1_max, "")->capture_default_str();
  tune_cmd->add_option("--mu2-min", tune.options.mu2_min, "")->capture_default_str();
  tune_cmd->add_option("--mu2-max", tune.options.mu2_max, "")->capture_default_str();
  tune_cmd->add_flag("--stage3", tune.options.stage3, "run the final refinement stage");
  tune_cmd->add_option("--max-iters", tune.max_iters, "solver iteration cap per probe")
      ->capture_default_str();
  tune_cmd->add_option("--denoiser", tune.denoiser_name, "identity | l1 | tv")
      ->capture_default_str();
  tune_cmd->add_option("--log", tune.log_path, "probe log CSV")->capture_default_str();

  // evaluate --------------------------------------------------------------
  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a reconstruction against truth");
  evaluate->set_config("--config");
  evaluate->add_option("--recon", ev.recon, "reconstructed HSC1 cube")->required();
  evaluate->add_option("--truth", ev.truth, "ground-truth HSC1 cube")->required();
  evaluate->add_option("--metrics", ev.metrics_text, "comma list of psnr,ssim,sam,de00")
      ->capture_default_str();
  evaluate->add_option("--out", ev.out, "metrics CSV path");
  evaluate->add_option("--rgb", ev.rgb_prefix, "write sRGB renders with this path prefix");
  evaluate->add_option("--compose-rgb", ev.compose_text,
                       "compose r,g,b from three stack planes (indices i,j,k)");
  evaluate->add_option("--stack", ev.compose_stack, "FST1 stack for --compose-rgb");
  evaluate->add_option("--compose-out", ev.compose_out, "output PPM for --compose-rgb")
      ->capture_default_str();
  evaluate->add_option("--white-patch", ev.white_patch_text,
                       "row,col,height,width patch used to normalize the composition");

  // info -----------------------------------------------------------------
  std::string info_path;
  CLI::App* info = app.add_subcommand("info", "print the header of any container file");
  info->add_option("file", info_path, "HSC1 / FST1 / PSF1 file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (threads > 0) csweep::set_max_threads(threads);
    if (make_psfs->parsed()) return run_make_psfs(mp);
    if (make_basis->parsed()) return run_make_basis(mb);
    if (simulate->parsed()) return run_simulate(sim);
    if (reconstruct->parsed()) return run_reconstruct(rec);
    if (tune_cmd->parsed()) return run_tune(tune);
    if (evaluate->parsed()) return run_evaluate(ev);
    if (info->parsed()) return run_info(info_path);
  } catch (const csweep::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
