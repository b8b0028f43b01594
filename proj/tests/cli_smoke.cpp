// End-to-end exercises of the installed command-line binary (path in the
// CSWEEP_BIN environment variable): happy paths, failure exit codes, and
// byte determinism of the file outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csweep/basis.hpp"
#include "csweep/io.hpp"
#include "csweep/types.hpp"

using namespace csweep;
namespace fs = std::filesystem;

namespace {

const std::string& bin() {
  static const std::string path = [] {
    const char* env = std::getenv("CSWEEP_BIN");
    REQUIRE_MESSAGE(env != nullptr, "CSWEEP_BIN must point at the cli binary");
    return std::string(env);
  }();
  return path;
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("csweep_smoke_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

int run(const std::string& args) {
  std::string cmd = "'" + bin() + "' " + args + " >> " + q(workdir() / "cli.log") + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

HyperspectralCube make_scene() {
  HyperspectralCube cube;
  cube.height = 12;
  cube.width = 12;
  cube.channels = 8;
  cube.wavelengths_nm.resize(8);
  for (int j = 0; j < 8; ++j) cube.wavelengths_nm[j] = 440.0 + 40.0 * j;
  cube.data.resize(cube.plane_size() * 8);
  for (std::size_t i = 0; i < cube.data.size(); ++i)
    cube.data[i] = static_cast<double>((i * 37 + 11) % 200) / 256.0 + 0.1;
  return cube;
}

// Rear-lens table tuned so the pair sweeps 0.35 mm of combined focus
// between 440 and 720 nm (front lens constant at 100 mm, contact spacing).
void write_lens_tables(const fs::path& lens1, const fs::path& lens2) {
  {
    std::ofstream out(lens1);
    out << "wavelength_nm,focal_length_mm\n400,100.0\n800,100.0\n";
  }
  const double f1 = 100.0, f2_lo = 80.0;
  const double c_lo = f1 * f2_lo / (f1 + f2_lo);
  const double c_hi = c_lo + 0.35;
  const double f2_hi = f1 * c_hi / (f1 - c_hi);
  {
    std::ofstream out(lens2);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", f2_hi);
    out << "wavelength_nm,focal_length_mm\n440,80.0\n720," << buf << "\n";
  }
}

}  // namespace

TEST_CASE("bare invocation fails, help succeeds") {
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("full pipeline produces readable, consistent artifacts") {
  const fs::path d = workdir();
  write_cube((d / "scene.hsc").string(), make_scene());

  // kernel bank straight from the lens description
  write_lens_tables(d / "lens1.csv", d / "lens2.csv");
  REQUIRE(run("make-psfs --lens1 " + q(d / "lens1.csv") + " --lens2 " + q(d / "lens2.csv") +
              " --wavelengths 440:720:40 --n 3 --separation 0 --out " + q(d / "bank.psf")) == 0);
  PsfStack bank = read_psfs((d / "bank.psf").string());
  CHECK(bank.count == 3);
  CHECK(bank.channels == 8);
  CHECK(validate(bank).ok());
  CHECK(run("info " + q(d / "bank.psf")) == 0);

  // spectral basis fit to the scene itself
  REQUIRE(run("make-basis --training " + q(d / "scene.hsc") + " --dim 4 --out " +
              q(d / "basis.csv")) == 0);
  SpectralBasis basis = read_basis_csv((d / "basis.csv").string());
  CHECK(basis.dim == 4);
  CHECK(basis.channels == 8);

  // clean capture
  REQUIRE(run("simulate --scene " + q(d / "scene.hsc") + " --psfs " + q(d / "bank.psf") +
              " --no-noise --out " + q(d / "clean.fst")) == 0);
  FocalStack clean = read_stack((d / "clean.fst").string());
  CHECK(clean.count == 3);
  CHECK(clean.height == 12);
  CHECK(run("info " + q(d / "clean.fst")) == 0);

  // noisy captures: same seed agrees byte for byte, different seed differs
  const std::string noisy = "simulate --scene " + q(d / "scene.hsc") + " --psfs " +
                            q(d / "bank.psf") + " --photon-flux 7.5e15 --seed 7 --out ";
  REQUIRE(run(noisy + q(d / "noisy_a.fst")) == 0);
  REQUIRE(run(noisy + q(d / "noisy_b.fst")) == 0);
  CHECK(slurp(d / "noisy_a.fst") == slurp(d / "noisy_b.fst"));
  REQUIRE(run("simulate --scene " + q(d / "scene.hsc") + " --psfs " + q(d / "bank.psf") +
              " --photon-flux 7.5e15 --seed 8 --out " + q(d / "noisy_c.fst")) == 0);
  CHECK(slurp(d / "noisy_a.fst") != slurp(d / "noisy_c.fst"));

  // reconstruction, twice: identical bytes, diagnostics alongside
  const std::string rec = "reconstruct --stack " + q(d / "clean.fst") + " --psfs " +
                          q(d / "bank.psf") + " --basis " + q(d / "basis.csv") +
                          " --mu1 0.5 --mu2 1e-4 --max-iters 3 --step-tol 1e-12" +
                          " --divergence 1e18 --halving-iter 99 --out ";
  REQUIRE(run(rec + q(d / "recon.hsc")) == 0);
  REQUIRE(run(rec + q(d / "recon2.hsc")) == 0);
  CHECK(slurp(d / "recon.hsc") == slurp(d / "recon2.hsc"));

  HyperspectralCube recon = read_cube((d / "recon.hsc").string());
  CHECK(recon.height == 12);
  CHECK(recon.width == 12);
  CHECK(recon.channels == 8);
  std::string diag = slurp(d / "recon.hsc.diag.csv");
  CHECK(diag.rfind("iter,step,primal_residual,basis_dim", 0) == 0);

  // thread cap must not change the result
  REQUIRE(run("--threads 1 " + rec + q(d / "recon_t1.hsc")) == 0);
  REQUIRE(run("--threads 8 " + rec + q(d / "recon_t8.hsc")) == 0);
  CHECK(slurp(d / "recon_t1.hsc") == slurp(d / "recon.hsc"));
  CHECK(slurp(d / "recon_t8.hsc") == slurp(d / "recon.hsc"));

  // scoring, renders, and the stack composite
  REQUIRE(run("evaluate --recon " + q(d / "recon.hsc") + " --truth " + q(d / "scene.hsc") +
              " --metrics psnr,sam --out " + q(d / "metrics.csv") + " --rgb " +
              q(d / "render") + " --compose-rgb 2,1,0 --stack " + q(d / "clean.fst") +
              " --compose-out " + q(d / "compose.ppm")) == 0);
  std::string metrics = slurp(d / "metrics.csv");
  CHECK(metrics.rfind("metric,value", 0) == 0);
  CHECK(metrics.find("psnr,") != std::string::npos);
  CHECK(metrics.find("sam,") != std::string::npos);
  CHECK(fs::exists(d / "render_recon.ppm"));
  CHECK(fs::exists(d / "render_truth.ppm"));
  CHECK(slurp(d / "compose.ppm").rfind("P6", 0) == 0);

  CHECK(run("info " + q(d / "recon.hsc")) == 0);
}

TEST_CASE("hyperparameter search runs on a tiny instance") {
  const fs::path d = workdir();
  REQUIRE(fs::exists(d / "clean.fst"));  // produced by the pipeline case
  REQUIRE(run("tune --stack " + q(d / "clean.fst") + " --truth " + q(d / "scene.hsc") +
              " --psfs " + q(d / "bank.psf") + " --basis " + q(d / "basis.csv") +
              " --mu1-min 0.1 --mu1-max 1 --mu2-min 1e-5 --mu2-max 1e-4" +
              " --max-iters 2 --log " + q(d / "tune.csv")) == 0);
  std::string log = slurp(d / "tune.csv");
  CHECK(log.rfind("stage,mu1,mu2,psnr", 0) == 0);
  CHECK(log.find("\n2,") != std::string::npos);  // refinement stage probes present
}

TEST_CASE("failure paths exit with the input-error code") {
  const fs::path d = workdir();
  CHECK(run("info " + q(d / "does_not_exist.hsc")) == 2);
  CHECK(run("simulate --scene " + q(d / "does_not_exist.hsc") + " --psfs " + q(d / "bank.psf") +
            " --out " + q(d / "x.fst")) == 2);
  CHECK(run("simulate --scene " + q(d / "scene.hsc") + " --psfs " + q(d / "bank.psf") +
            " --n 7 --out " + q(d / "x.fst")) == 2);  // bank holds 3 positions
  CHECK(run("reconstruct --stack " + q(d / "clean.fst") + " --psfs " + q(d / "bank.psf") +
            " --basis " + q(d / "basis.csv") + " --denoiser nope --out " + q(d / "x.hsc")) == 2);
  CHECK(run("evaluate --recon " + q(d / "recon.hsc") + " --truth " + q(d / "scene.hsc") +
            " --metrics sharpness") == 2);

  std::ofstream(d / "garbage.bin") << "MAGICngarbage";
  CHECK(run("info " + q(d / "garbage.bin")) == 2);
}
