#pragma once

#include <span>
#include <vector>

#include "eiprec/channel.hpp"
#include "eiprec/types.hpp"

namespace eiprec::rie {

struct SpectralDecomp {
  // Descending.
  RealVector eigenvalues;
  // Orthonormal columns matching eigenvalues.
  ComplexMatrix eigenvectors;
  // Index of the negative partner of each eigenvalue, -1 on the null space.
  std::vector<int> partner;
  double null_threshold = 0.0;

  int null_count() const;
};

SpectralDecomp eig_bsca(const ComplexMatrix& B);

// Value of the empirical Stieltjes transform at omega + i*eps in the g ~ -1/z convention.
struct LocalStieltjes {
  double h = 0.0;
  double rho = 0.0;
};

// Leaves out gram_eigs[k].
LocalStieltjes local_stieltjes(std::span<const double> gram_eigs, std::size_t k, double eps);
// Leaves out one entry equal to omega, if present.
LocalStieltjes local_stieltjes(std::span<const double> gram_eigs, double omega, double eps);

enum class ShrinkVariant { anchored, printed };

struct ShrinkageInputs {
  double omega = 0.0;
  double h = 0.0;
  double rho = 0.0;
  double q = 0.0;
  double alpha = 0.0;
};

double shrink_eigenvalue(const ShrinkageInputs& in, ShrinkVariant variant);

// Off-diagonal block of V diag(lambda_hat) V^H.
ComplexMatrix reconstruct(const SpectralDecomp& decomp, std::span<const double> lambda_hat, const SystemDims& dims);

// resolvent: the shrinkage consumes Re of ∫ρ/(ω - λ - iε), the negated h of LocalStieltjes.
// paper: the shrinkage consumes LocalStieltjes::h as is.
enum class HilbertSign { resolvent, paper };

// adaptive: mean Gram eigenvalue times U^(-1/3).
// local_law: (U + A)^(-1/2).
enum class Bandwidth { adaptive, local_law };

struct CleanerConfig {
  ShrinkVariant variant = ShrinkVariant::anchored;
  channel::CorruptionMode observation = channel::CorruptionMode::additive;
  double c = 1.0;
  HilbertSign hilbert = HilbertSign::resolvent;
  Bandwidth bandwidth = Bandwidth::adaptive;
};

double bandwidth(std::span<const double> gram_eigs, const SystemDims& dims, Bandwidth rule);

// Damped observations are divided by sqrt(1 - eta_hat) first. The result estimates H.
ComplexMatrix clean_channel(const ComplexMatrix& H_obs, double eta_hat, const CleanerConfig& cfg = {});

ComplexMatrix linear_mmse_baseline(const ComplexMatrix& H_obs, double eta);

double mse(const ComplexMatrix& H, const ComplexMatrix& H_hat);

}  // namespace eiprec::rie
