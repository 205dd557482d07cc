#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "spikelab/rng.hpp"

namespace spikelab {

/// Diagonal perturbation W = diag(pi1 x k, rest..., 0...) of an n x n matrix.
/// `rest` holds the eigenvalues below pi1, sorted non-increasing.
struct DeformationSpec {
  int n = 0;
  double pi1 = 0.0;
  int k = 0;
  std::vector<double> rest;

  /// Builds a validated spec; `rest` may arrive in any order and is sorted.
  static DeformationSpec make(int n, double pi1, int k, std::vector<double> rest = {});

  void validate() const;  // throws ParameterError on any invariant violation

  int r() const { return static_cast<int>(rest.size()); }
  bool pure_gue() const { return k == 0; }
  double alpha_n() const;  // sqrt(k/n)
  double beta_n() const;   // r/n
  double trace_w() const;
  /// Largest logarithmic pole of the exponent F: max(0, pi1, rest...) for
  /// k >= 1, max(0, rest...) for the pure case.
  double largest_pole() const;

  bool operator==(const DeformationSpec&) const = default;
};

/// Dense Hermitian matrix, column-major storage.
struct HermitianMatrix {
  int n = 0;
  std::vector<std::complex<double>> entries;

  explicit HermitianMatrix(int dim) : n(dim), entries(static_cast<std::size_t>(dim) * dim) {}
  std::complex<double>& at(int i, int j) { return entries[static_cast<std::size_t>(j) * n + i]; }
  const std::complex<double>& at(int i, int j) const {
    return entries[static_cast<std::size_t>(j) * n + i];
  }
  std::complex<double> trace() const;
};

/// One spectral draw: eigenvalues sorted descending plus full provenance.
struct SpectralSample {
  std::vector<double> eigenvalues;  // lambda_1 >= ... >= lambda_n
  DeformationSpec spec;
  std::uint64_t master_seed = 0;
  std::int64_t trial_index = 0;

  double lambda1() const { return eigenvalues.front(); }
};

/// Draws an n x n GUE matrix with parameter sigma2: off-diagonal entries
/// complex Gaussian with E|V_ij|^2 = sigma2, diagonal real N(0, sigma2).
/// Only i <= j is sampled; Hermitian symmetry holds by construction.
HermitianMatrix sample_gue(int n, double sigma2, TrialRng& rng);

/// W + V/sqrt(n) with V ~ GUE(1). The diagonal W is materialized here only.
HermitianMatrix sample_deformed_matrix(const DeformationSpec& spec, TrialRng& rng);

/// Eigenvalues of a Hermitian matrix, descending. Consumes the matrix
/// storage. Throws NumericError if the solver does not converge.
std::vector<double> hermitian_eigenvalues(HermitianMatrix matrix);

/// Full pipeline: derive the trial stream, draw W + V/sqrt(n), solve.
/// Deterministic given (spec, master_seed, trial_index).
SpectralSample sample_deformed_spectrum(const DeformationSpec& spec, std::uint64_t master_seed,
                                        std::int64_t trial_index);

}  // namespace spikelab
