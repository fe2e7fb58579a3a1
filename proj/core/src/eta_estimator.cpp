#include "eiprec/eta_estimator.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace eiprec::eta {

void EstimatorConfig::validate() const {
  if (order < 1 || order > 3) throw DomainError("estimator order must be 1, 2 or 3");
  if (grid_points < 3) throw DomainError("estimator grid needs at least 3 points");
  if (!(tolerance > 0.0)) throw DomainError("estimator tolerance must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("estimator delta must lie in (0, 1)");
  if (!(c > 0.0)) throw DomainError("noise scale c must be positive");
}

int default_order(const SystemDims& dims) {
  return static_cast<double>(dims.users) * dims.antennas < 1e4 ? 1 : 3;
}

rmt::MomentTriple moments_from_eigenvalues(std::span<const double> eigs) {
  if (eigs.empty()) throw std::invalid_argument("empty eigenvalue list");
  rmt::MomentTriple m;
  for (double l : eigs) {
    m.m1 += l;
    m.m2 += l * l;
    m.m3 += l * l * l;
  }
  const double n = static_cast<double>(eigs.size());
  return {m.m1 / n, m.m2 / n, m.m3 / n};
}

std::vector<double> gram_eigenvalues(const ComplexMatrix& X) {
  const ComplexMatrix gram = X * X.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

rmt::MomentTriple empirical_moments(const ComplexMatrix& H_obs) {
  if (H_obs.rows() >= H_obs.cols()) throw ShapeError("observation must have fewer rows than columns");
  const auto eigs = gram_eigenvalues(H_obs);
  return moments_from_eigenvalues(eigs);
}

namespace {

double objective(const rmt::CumulantTriple& k_hat, double eta, double q, const EstimatorConfig& cfg) {
  const auto k = rmt::noisy_gram_cumulants_theory(eta, AspectRatio(q), cfg.mode, cfg.c);
  const double d1 = k_hat.k1 - k.k1;
  const double d2 = k_hat.k2 - k.k2;
  const double d3 = k_hat.k3 - k.k3;
  double f = d1 * d1;
  if (cfg.order >= 2) f += d2 * d2;
  if (cfg.order >= 3) f += d3 * d3;
  return f;
}

}  // namespace

EtaEstimate estimate_eta_from_cumulants(const rmt::CumulantTriple& k_hat, const SystemDims& dims,
                                        const EstimatorConfig& cfg) {
  cfg.validate();
  const double q = dims.q().value();
  const double hi = 1.0 - cfg.delta;
  const auto f = [&](double eta) { return objective(k_hat, eta, q, cfg); };

  const int n = cfg.grid_points;
  int best_i = 0;
  double best_f = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = f(hi * i / (n - 1));
    if (v < best_f) {
      best_f = v;
      best_i = i;
    }
  }
  double best_x = hi * best_i / (n - 1);
  std::vector<double> trace{best_f};

  double lo_b = hi * std::max(best_i - 1, 0) / (n - 1);
  double hi_b = hi * std::min(best_i + 1, n - 1) / (n - 1);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi_b - invphi * (hi_b - lo_b);
  double x2 = lo_b + invphi * (hi_b - lo_b);
  double f1 = f(x1);
  double f2 = f(x2);
  int steps = 0;
  while (hi_b - lo_b > cfg.tolerance) {
    if (++steps > cfg.max_refinements)
      throw NumericalError("eta refinement did not converge; coarse argmin " + std::to_string(hi * best_i / (n - 1)));
    if (f1 <= f2) {
      hi_b = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi_b - invphi * (hi_b - lo_b);
      f1 = f(x1);
    } else {
      lo_b = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo_b + invphi * (hi_b - lo_b);
      f2 = f(x2);
    }
    const double xm = f1 <= f2 ? x1 : x2;
    const double fm = std::min(f1, f2);
    if (fm < best_f) {
      best_f = fm;
      best_x = xm;
    }
    trace.push_back(best_f);
  }

  EtaEstimate est;
  est.eta_hat = best_x;
  est.alpha_hat = std::sqrt(best_x * cfg.c / (1.0 - best_x));
  est.objective_value = best_f;
  est.cumulants = k_hat;
  est.trace = std::move(trace);
  const double s = 1.0 + est.alpha_hat * est.alpha_hat;
  const double band = 2.0 / std::sqrt(static_cast<double>(dims.users) * dims.antennas);
  est.identifiable = !(cfg.data_mode == channel::CorruptionMode::damped && cfg.c == 1.0 && std::abs(s - 1.0) < band);
  return est;
}

EtaEstimate estimate_eta(const ComplexMatrix& H_obs, const EstimatorConfig& cfg) {
  if (H_obs.squaredNorm() == 0.0) throw DomainError("observation is zero");
  const SystemDims dims(static_cast<int>(H_obs.rows()), static_cast<int>(H_obs.cols()));
  return estimate_eta_from_cumulants(rmt::free_cumulants(empirical_moments(H_obs)), dims, cfg);
}

double delta_eta(double true_eta, const EtaEstimate& est) { return std::abs(true_eta - est.eta_hat); }

}  // namespace eiprec::eta
