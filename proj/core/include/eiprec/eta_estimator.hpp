#pragma once

#include <span>
#include <vector>

#include "eiprec/channel.hpp"
#include "eiprec/rmt.hpp"
#include "eiprec/types.hpp"

namespace eiprec::eta {

struct EstimatorConfig {
  // Highest cumulant matched, 1..3.
  int order = 3;
  rmt::TheoryMode mode = rmt::TheoryMode::gaussian_equivalent;
  int grid_points = 200;
  double tolerance = 1e-6;
  // Search interval is [0, 1 - delta].
  double delta = 1e-3;
  int max_refinements = 200;
  channel::CorruptionMode data_mode = channel::CorruptionMode::additive;
  double c = 1.0;

  void validate() const;
};

// Order 1 below U*A = 1e4, order 3 above.
int default_order(const SystemDims& dims);

struct EtaEstimate {
  double eta_hat = 0.0;
  double alpha_hat = 0.0;
  double objective_value = 0.0;
  bool identifiable = true;
  rmt::CumulantTriple cumulants;
  // Best objective after the coarse grid and after each refinement step.
  std::vector<double> trace;
};

rmt::MomentTriple moments_from_eigenvalues(std::span<const double> eigs);
std::vector<double> gram_eigenvalues(const ComplexMatrix& X);
rmt::MomentTriple empirical_moments(const ComplexMatrix& H_obs);

EtaEstimate estimate_eta(const ComplexMatrix& H_obs, const EstimatorConfig& cfg);
EtaEstimate estimate_eta_from_cumulants(const rmt::CumulantTriple& k, const SystemDims& dims,
                                        const EstimatorConfig& cfg);

double delta_eta(double true_eta, const EtaEstimate& est);

}  // namespace eiprec::eta
