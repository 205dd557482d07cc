#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace spikelab {

/// SplitMix64 step. Used as the documented stream-splitting function:
/// the generator state for trial i of a run with master seed s is seeded
/// from splitmix64 applied to s advanced by i+1 steps.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derived seed for one trial. Trials are independent streams, so they can
/// run in any order or concurrently and still reproduce bit-for-bit.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  std::uint64_t s = master_seed;
  std::uint64_t z = splitmix64_next(s);
  s = master_seed ^ (0xD1B54A32D192ED03ULL * (trial_index + 1));
  z ^= splitmix64_next(s);
  return z;
}

/// Deterministic per-trial generator. The uniform and Gaussian mappings are
/// spelled out here (rather than using std:: distributions) because the
/// standard leaves distribution algorithms implementation-defined and the
/// output of a trial must be reproducible from (master_seed, trial_index)
/// alone.
class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : engine_(seed) {}
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : engine_(trial_seed(master_seed, trial_index)) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; generates pairs, caches the spare.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Complex Gaussian with E|z|^2 = variance: independent real and imaginary
  /// parts, each N(0, variance/2).
  std::complex<double> complex_gaussian(double variance) {
    double s = std::sqrt(variance / 2.0);
    double re = s * gaussian();
    double im = s * gaussian();
    return {re, im};
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace spikelab
