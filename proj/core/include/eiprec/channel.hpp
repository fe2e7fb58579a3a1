#pragma once

#include <filesystem>
#include <iosfwd>

#include "eiprec/random.hpp"
#include "eiprec/types.hpp"

namespace eiprec::channel {

enum class CorruptionMode { damped, additive };

struct CorruptionModel {
  double eta = 0.0;
  CorruptionMode mode = CorruptionMode::additive;
  // Variance of the error entries relative to 1/A.
  double c = 1.0;

  double alpha() const;
  void validate() const;
};

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double variance, RandomStream& rng);

// U x A matrix with i.i.d. CN(0, 1/A) entries.
ComplexMatrix gen_channel(const SystemDims& dims, RandomStream& rng);

// damped:   sqrt(1 - eta) H + sqrt(eta c) E'
// additive: H + alpha E'
// E' has CN(0, 1/A) entries and is drawn identically in both modes.
ComplexMatrix corrupt(const ComplexMatrix& H, const CorruptionModel& model, RandomStream& rng);

ComplexMatrix build_bsca(const ComplexMatrix& X);
ComplexMatrix extract_channel(const ComplexMatrix& B, const SystemDims& dims);
ComplexMatrix normalize_observation(const ComplexMatrix& H_obs, double eta_hat);

// Binary layout: u64 rows, u64 cols, then rows*cols (re, im) f64 pairs in row-major order,
// all little-endian.
void write_matrix(std::ostream& out, const ComplexMatrix& M);
ComplexMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const ComplexMatrix& M);
ComplexMatrix load_matrix(const std::filesystem::path& path);

}  // namespace eiprec::channel
