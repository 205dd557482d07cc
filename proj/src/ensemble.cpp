#include "spikelab/ensemble.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>

#include "spikelab/errors.hpp"

namespace spikelab {

namespace {

// Trials are parallelized at the experiment level, so BLAS must stay
// single-threaded. OpenBLAS reads this at library init.
const bool blas_env_set = [] {
  ::setenv("OPENBLAS_NUM_THREADS", "1", 0);
  return true;
}();

}  // namespace

DeformationSpec DeformationSpec::make(int n, double pi1, int k, std::vector<double> rest) {
  DeformationSpec spec;
  spec.n = n;
  spec.pi1 = pi1;
  spec.k = k;
  spec.rest = std::move(rest);
  std::sort(spec.rest.begin(), spec.rest.end(), std::greater<double>());
  spec.validate();
  return spec;
}

void DeformationSpec::validate() const {
  if (n < 1) throw ParameterError("DeformationSpec: n must be >= 1");
  if (k < 0) throw ParameterError("DeformationSpec: k must be >= 0");
  if (k + r() > n) throw ParameterError("DeformationSpec: rank k + r exceeds dimension n");
  if (k == 0 && !rest.empty())
    throw ParameterError("DeformationSpec: k = 0 is the pure case; rest must be empty");
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (!(rest[i] < pi1))
      throw ParameterError("DeformationSpec: every entry of rest must be < pi1");
    if (i > 0 && rest[i - 1] < rest[i])
      throw ParameterError("DeformationSpec: rest must be sorted non-increasing");
  }
}

double DeformationSpec::alpha_n() const { return std::sqrt(static_cast<double>(k) / n); }

double DeformationSpec::beta_n() const { return static_cast<double>(r()) / n; }

double DeformationSpec::trace_w() const {
  return k * pi1 + std::accumulate(rest.begin(), rest.end(), 0.0);
}

double DeformationSpec::largest_pole() const {
  double p = 0.0;
  if (k >= 1) p = std::max(p, pi1);
  if (!rest.empty()) p = std::max(p, rest.front());
  return p;
}

std::complex<double> HermitianMatrix::trace() const {
  std::complex<double> t = 0.0;
  for (int i = 0; i < n; ++i) t += at(i, i);
  return t;
}

HermitianMatrix sample_gue(int n, double sigma2, TrialRng& rng) {
  if (n < 1) throw ParameterError("sample_gue: n must be >= 1");
  if (!(sigma2 > 0.0)) throw ParameterError("sample_gue: sigma2 must be > 0");
  HermitianMatrix m(n);
  double diag_sd = std::sqrt(sigma2);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = diag_sd * rng.gaussian();
    for (int j = i + 1; j < n; ++j) {
      std::complex<double> z = rng.complex_gaussian(sigma2);
      m.at(i, j) = z;
      m.at(j, i) = std::conj(z);
    }
  }
  return m;
}

HermitianMatrix sample_deformed_matrix(const DeformationSpec& spec, TrialRng& rng) {
  spec.validate();
  HermitianMatrix m = sample_gue(spec.n, 1.0, rng);
  double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(spec.n));
  for (auto& e : m.entries) e *= inv_sqrt_n;
  for (int i = 0; i < spec.k; ++i) m.at(i, i) += spec.pi1;
  for (int i = 0; i < spec.r(); ++i) m.at(spec.k + i, spec.k + i) += spec.rest[i];
  return m;
}

std::vector<double> hermitian_eigenvalues(HermitianMatrix matrix) {
  int n = matrix.n;
  std::vector<double> w(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                            reinterpret_cast<lapack_complex_double*>(matrix.entries.data()), n,
                            w.data());
  if (info != 0)
    throw NumericError("hermitian_eigenvalues: zheevd failed with info=" + std::to_string(info));
  std::reverse(w.begin(), w.end());  // LAPACK returns ascending
  return w;
}

SpectralSample sample_deformed_spectrum(const DeformationSpec& spec, std::uint64_t master_seed,
                                        std::int64_t trial_index) {
  TrialRng rng(master_seed, static_cast<std::uint64_t>(trial_index));
  HermitianMatrix m = sample_deformed_matrix(spec, rng);
  SpectralSample sample;
  sample.spec = spec;
  sample.master_seed = master_seed;
  sample.trial_index = trial_index;
  try {
    sample.eigenvalues = hermitian_eigenvalues(std::move(m));
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " [master_seed=" + std::to_string(master_seed) +
                       " trial=" + std::to_string(trial_index) + "]");
  }
  return sample;
}

}  // namespace spikelab
