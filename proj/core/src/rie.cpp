#include "eiprec/rie.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace eiprec::rie {

int SpectralDecomp::null_count() const {
  return static_cast<int>(std::count(partner.begin(), partner.end(), -1));
}

SpectralDecomp eig_bsca(const ComplexMatrix& B) {
  if (B.rows() != B.cols()) throw ShapeError("augmented matrix must be square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(B);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  const Eigen::Index n = B.rows();
  SpectralDecomp d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double scale = n > 0 ? d.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  d.null_threshold = 1e-10 * scale;
  d.partner.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(d.eigenvalues(i)) <= d.null_threshold) continue;
    const Eigen::Index j = n - 1 - i;
    if (std::abs(d.eigenvalues(j)) <= d.null_threshold ||
        std::abs(d.eigenvalues(i) + d.eigenvalues(j)) >= 1e-8 * scale)
      throw NumericalError("eigenvalue " + std::to_string(d.eigenvalues(i)) + " has no negative partner");
    d.partner[static_cast<std::size_t>(i)] = static_cast<int>(j);
  }
  return d;
}

namespace {

LocalStieltjes local_stieltjes_excluding(std::span<const double> eigs, std::ptrdiff_t skip, double omega,
                                         double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const Complex z(omega, eps);
  Complex acc{};
  std::size_t count = 0;
  for (std::size_t j = 0; j < eigs.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == skip) continue;
    acc += 1.0 / (eigs[j] - z);
    ++count;
  }
  if (count == 0) return {};
  acc /= static_cast<double>(count);
  return {acc.real(), acc.imag()};
}

}  // namespace

LocalStieltjes local_stieltjes(std::span<const double> gram_eigs, std::size_t k, double eps) {
  if (k >= gram_eigs.size()) throw std::out_of_range("eigenvalue index");
  return local_stieltjes_excluding(gram_eigs, static_cast<std::ptrdiff_t>(k), gram_eigs[k], eps);
}

LocalStieltjes local_stieltjes(std::span<const double> gram_eigs, double omega, double eps) {
  const auto it = std::find(gram_eigs.begin(), gram_eigs.end(), omega);
  const std::ptrdiff_t skip = it == gram_eigs.end() ? -1 : it - gram_eigs.begin();
  return local_stieltjes_excluding(gram_eigs, skip, omega, eps);
}

double shrink_eigenvalue(const ShrinkageInputs& in, ShrinkVariant variant) {
  if (in.alpha < 0.0) throw DomainError("alpha must be nonnegative");
  const double a2 = in.alpha * in.alpha;
  const double q = in.q;
  const double w = in.omega;
  const double h = in.h;
  const double phi1 = 1.0 - q * a2 * h;
  const double phi2 = w - a2 * (1.0 - q) - 2.0 * q * a2 * h;
  const double phi3 = h * (w - a2 * (1.0 - q) + q * a2 * w * (in.rho - h));
  double value = phi1 * phi2 + phi3;
  if (variant == ShrinkVariant::anchored) value -= h * w;
  return std::max(value, 0.0);
}

ComplexMatrix reconstruct(const SpectralDecomp& decomp, std::span<const double> lambda_hat, const SystemDims& dims) {
  const Eigen::Index n = decomp.eigenvalues.size();
  if (n != dims.bsca_size() || static_cast<Eigen::Index>(lambda_hat.size()) != n)
    throw ShapeError("shrunk spectrum does not match the decomposition");
  double scale = 0.0;
  for (double l : lambda_hat) scale = std::max(scale, std::abs(l));
  ComplexMatrix out = ComplexMatrix::Zero(dims.users, dims.antennas);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int p = decomp.partner[static_cast<std::size_t>(i)];
    const double l = lambda_hat[static_cast<std::size_t>(i)];
    if (p < 0) {
      if (std::abs(l) > std::max(decomp.null_threshold, 1e-12 * scale))
        throw NumericalError("nonzero value assigned to the null space");
      continue;
    }
    if (std::abs(l + lambda_hat[static_cast<std::size_t>(p)]) > 1e-8 * scale)
      throw NumericalError("shrunk spectrum breaks the +/- pairing");
    const auto v = decomp.eigenvectors.col(i);
    out.noalias() += l * v.head(dims.users) * v.tail(dims.antennas).adjoint();
  }
  return out;
}

double bandwidth(std::span<const double> gram_eigs, const SystemDims& dims, Bandwidth rule) {
  if (rule == Bandwidth::local_law) return 1.0 / std::sqrt(static_cast<double>(dims.bsca_size()));
  double mean = 0.0;
  for (double l : gram_eigs) mean += l;
  mean /= static_cast<double>(gram_eigs.size());
  const double eps = mean * std::pow(static_cast<double>(dims.users), -1.0 / 3.0);
  return eps > 0.0 ? eps : 1.0 / std::sqrt(static_cast<double>(dims.bsca_size()));
}

ComplexMatrix clean_channel(const ComplexMatrix& H_obs, double eta_hat, const CleanerConfig& cfg) {
  if (!(eta_hat >= 0.0 && eta_hat < 1.0)) throw DomainError("eta_hat must lie in [0, 1)");
  const SystemDims dims(static_cast<int>(H_obs.rows()), static_cast<int>(H_obs.cols()));
  const double alpha = std::sqrt(eta_hat * cfg.c / (1.0 - eta_hat));
  if (alpha == 0.0 && cfg.variant == ShrinkVariant::anchored) return H_obs;

  const ComplexMatrix X = cfg.observation == channel::CorruptionMode::damped
                              ? channel::normalize_observation(H_obs, eta_hat)
                              : H_obs;
  const SpectralDecomp decomp = eig_bsca(channel::build_bsca(X));
  const Eigen::Index n = decomp.eigenvalues.size();

  std::vector<Eigen::Index> positive;
  std::vector<double> gram;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = decomp.eigenvalues(i);
    if (decomp.partner[static_cast<std::size_t>(i)] >= 0 && w > 0.0) {
      positive.push_back(i);
      gram.push_back(w * w);
    }
  }
  std::vector<double> lambda_hat(static_cast<std::size_t>(n), 0.0);
  if (gram.empty()) return reconstruct(decomp, lambda_hat, dims);

  const double eps = bandwidth(gram, dims, cfg.bandwidth);
  const double q = dims.q().value();
  for (std::size_t k = 0; k < gram.size(); ++k) {
    const LocalStieltjes ls = local_stieltjes(gram, k, eps);
    const double h = cfg.hilbert == HilbertSign::resolvent ? -ls.h : ls.h;
    const double shrunk = shrink_eigenvalue({gram[k], h, ls.rho, q, alpha}, cfg.variant);
    const double xi = std::sqrt(shrunk);
    const Eigen::Index i = positive[k];
    lambda_hat[static_cast<std::size_t>(i)] = xi;
    lambda_hat[static_cast<std::size_t>(decomp.partner[static_cast<std::size_t>(i)])] = -xi;
  }
  return reconstruct(decomp, lambda_hat, dims);
}

ComplexMatrix linear_mmse_baseline(const ComplexMatrix& H_obs, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
  return std::sqrt(1.0 - eta) * H_obs;
}

double mse(const ComplexMatrix& H, const ComplexMatrix& H_hat) {
  if (H.rows() != H_hat.rows() || H.cols() != H_hat.cols()) throw ShapeError("mse operands differ in shape");
  return (H - H_hat).squaredNorm() / static_cast<double>(H.size());
}

}  // namespace eiprec::rie
