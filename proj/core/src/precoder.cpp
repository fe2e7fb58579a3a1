#include "eiprec/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace eiprec::precode {

quant::QuantizerSpec DacConfig::spec_for(double sigma_m2) const {
  if (bypass) return quant::bypass_quantizer();
  if (step > 0.0) return quant::make_quantizer(bits, step);
  return quant::make_quantizer_auto(bits, std::sqrt(0.5 * sigma_m2));
}

namespace {

void normalize_power(ComplexMatrix& P, double p_total) {
  const double norm = P.norm();
  if (norm == 0.0) throw NumericalError("precoder is zero");
  P *= std::sqrt(p_total) / norm;
}

ComplexMatrix regularized_inverse_right(const ComplexMatrix& H_hat, double reg) {
  ComplexMatrix G = H_hat * H_hat.adjoint();
  G.diagonal().array() += reg;
  Eigen::LLT<ComplexMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("regularised Gram is not positive definite");
  return llt.solve(H_hat).adjoint();
}

}  // namespace

BussgangModel bussgang_model(const ComplexMatrix& P, const DacConfig& dac, double sigma2, int users) {
  if (P.size() == 0 || P.norm() == 0.0) throw DomainError("precoder is zero");
  const Eigen::Index a = P.rows();
  BussgangModel m;
  m.F = RealVector::Ones(a);
  m.sigma_d2 = RealVector::Zero(a);
  m.sigma_m2 = P.rowwise().squaredNorm();
  m.distortion = RealVector::Zero(a);
  double radiated = 0.0;
  for (Eigen::Index i = 0; i < a; ++i) {
    const double s2 = m.sigma_m2(i);
    if (s2 <= 0.0) continue;
    const auto spec = dac.spec_for(s2);
    const double f = quant::bussgang_gain(spec, s2);
    const double pow = quant::output_power(spec, s2);
    m.F(i) = f;
    m.sigma_d2(i) = (1.0 - f) * (users * sigma2 + 1.0);
    m.distortion(i) = std::max(pow - f * f * s2, 0.0);
    radiated += pow;
  }
  m.output_gain = radiated > 0.0 ? std::sqrt(P.squaredNorm() / radiated) : 1.0;
  return m;
}

BussgangModel qce_model(const ComplexMatrix& P, int bits, double p_total) {
  const Eigen::Index a = P.rows();
  const double amp2 = p_total / static_cast<double>(a);
  const double sector = std::numbers::pi / static_cast<double>(1 << bits);
  const double sinc = std::sin(sector) / sector;
  BussgangModel m;
  m.F = RealVector::Zero(a);
  m.sigma_d2 = RealVector::Zero(a);
  m.sigma_m2 = P.rowwise().squaredNorm();
  m.distortion = RealVector::Constant(a, amp2);
  for (Eigen::Index i = 0; i < a; ++i) {
    const double s2 = m.sigma_m2(i);
    if (s2 <= 0.0) continue;
    const double f = std::sqrt(amp2) * 0.5 * std::sqrt(std::numbers::pi) / std::sqrt(s2) * sinc;
    m.F(i) = f;
    m.distortion(i) = std::max(amp2 - f * f * s2, 0.0);
  }
  m.output_gain = 1.0;
  return m;
}

BussgangModel link_model(const PrecodeOutput& out, const DacConfig& dac, double sigma2, double p_total) {
  if (out.kind == PrecoderKind::qce) return qce_model(out.P, dac.bypass ? 30 : dac.bits, p_total);
  return bussgang_model(out.P, dac, sigma2, static_cast<int>(out.P.cols()));
}

double receiver_scaling(const ComplexMatrix& H, const PrecodeOutput& out, const BussgangModel& model, double sigma2) {
  if (H.cols() != out.P.rows()) throw ShapeError("channel and precoder do not conform");
  const double g = model.output_gain;
  const ComplexMatrix HFP = H * (model.F.asDiagonal() * out.P);
  const double num = g * HFP.trace().real();
  const RealVector col_norms = H.colwise().squaredNorm().transpose();
  const double den = g * g * (HFP.squaredNorm() + col_norms.dot(model.distortion)) +
                     static_cast<double>(H.rows()) * sigma2;
  if (!(den > 0.0)) throw NumericalError("receiver scaling is undefined");
  return num / den;
}

PrecodeOutput wf_precode(const ComplexMatrix& H_hat, double sigma2, double p_total) {
  if (!(sigma2 >= 0.0) || !(p_total > 0.0)) throw DomainError("noise variance and power must be valid");
  PrecodeOutput out;
  out.kind = PrecoderKind::wf;
  out.P = regularized_inverse_right(H_hat, static_cast<double>(H_hat.rows()) * sigma2 / p_total);
  normalize_power(out.P, p_total);
  const DacConfig ideal{1, true, 0.0};
  out.beta = receiver_scaling(H_hat, out, bussgang_model(out.P, ideal, sigma2, static_cast<int>(H_hat.rows())), sigma2);
  return out;
}

WfqResult wfq_precode(const ComplexMatrix& H_hat, double sigma2, double p_total, const DacConfig& dac,
                      int max_iterations, double tolerance) {
  if (!(sigma2 >= 0.0) || !(p_total > 0.0)) throw DomainError("noise variance and power must be valid");
  const Eigen::Index u = H_hat.rows();
  const Eigen::Index a = H_hat.cols();
  const ComplexMatrix gram = H_hat.adjoint() * H_hat;
  RealVector sd = RealVector::Zero(a);
  WfqResult res;
  for (int it = 1; it <= max_iterations; ++it) {
    ComplexMatrix P;
    if ((sd.array() == 0.0).all()) {
      P = regularized_inverse_right(H_hat, static_cast<double>(u) * sigma2 / p_total);
    } else {
      ComplexMatrix G = gram;
      G.diagonal().array() += (static_cast<double>(u) / p_total) * (sigma2 + sd.array());
      Eigen::LLT<ComplexMatrix> llt(G);
      if (llt.info() != Eigen::Success) throw NumericalError("WFQ regulariser is not positive definite");
      P = llt.solve(H_hat.adjoint());
    }
    normalize_power(P, p_total);
    BussgangModel model = bussgang_model(P, dac, sigma2, static_cast<int>(u));
    const double scale = model.sigma_d2.cwiseAbs().maxCoeff();
    const double change = (model.sigma_d2 - sd).cwiseAbs().maxCoeff();
    const double r = scale > 0.0 ? change / scale : change;
    res.residuals.push_back(r);
    res.iterations = it;
    res.output.P = std::move(P);
    res.model = std::move(model);
    sd = res.model.sigma_d2;
    if (r < tolerance) {
      res.converged = true;
      break;
    }
  }
  res.output.kind = PrecoderKind::wfq;
  res.output.beta = receiver_scaling(H_hat, res.output, res.model, sigma2);
  return res;
}

PrecodeOutput baseline_precode(PrecoderKind kind, const ComplexMatrix& H_hat, double sigma2, double p_total,
                               const DacConfig& dac) {
  PrecodeOutput out;
  switch (kind) {
    case PrecoderKind::wf:
      return wf_precode(H_hat, sigma2, p_total);
    case PrecoderKind::wfq:
      return wfq_precode(H_hat, sigma2, p_total, dac).output;
    case PrecoderKind::mrt:
      out.P = H_hat.adjoint();
      break;
    case PrecoderKind::zf: {
      const ComplexMatrix G = H_hat * H_hat.adjoint();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(G, Eigen::EigenvaluesOnly);
      const double hi = es.eigenvalues().maxCoeff();
      if (!(es.eigenvalues().minCoeff() > 1e-12 * hi)) throw NumericalError("zero forcing needs full row rank");
      out.P = regularized_inverse_right(H_hat, 0.0);
      break;
    }
    case PrecoderKind::qce:
      out.P = regularized_inverse_right(H_hat, static_cast<double>(H_hat.rows()) * sigma2 / p_total);
      break;
  }
  out.kind = kind;
  normalize_power(out.P, p_total);
  out.beta = receiver_scaling(H_hat, out, link_model(out, dac, sigma2, p_total), sigma2);
  return out;
}

Complex qce_map(Complex x, int bits, double amplitude) {
  const double sector = 2.0 * std::numbers::pi / static_cast<double>(1 << bits);
  double phi = std::arg(x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  const double k = std::floor(phi / sector);
  return std::polar(amplitude, (k + 0.5) * sector);
}

ComplexMatrix transmit(const PrecodeOutput& out, const ComplexMatrix& S, const DacConfig& dac, double p_total) {
  if (out.P.cols() != S.rows()) throw ShapeError("symbol block does not conform to the precoder");
  ComplexMatrix X = out.P * S;
  if (out.kind == PrecoderKind::qce) {
    const double amp = std::sqrt(p_total / static_cast<double>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index j = 0; j < X.cols(); ++j)
        X(i, j) = dac.bypass ? (X(i, j) == Complex{} ? Complex(amp, 0.0) : amp * X(i, j) / std::abs(X(i, j)))
                             : qce_map(X(i, j), dac.bits, amp);
    return X;
  }
  if (dac.bypass) return X;
  const RealVector sigma_m2 = out.P.rowwise().squaredNorm();
  double radiated = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (sigma_m2(i) <= 0.0) {
      X.row(i).setZero();
      continue;
    }
    const auto spec = dac.spec_for(sigma_m2(i));
    radiated += quant::output_power(spec, sigma_m2(i));
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = quant::quantize(X(i, j), spec);
  }
  if (radiated > 0.0) X *= std::sqrt(out.P.squaredNorm() / radiated);
  return X;
}

std::string_view to_string(PrecoderKind kind) {
  switch (kind) {
    case PrecoderKind::mrt: return "mrt";
    case PrecoderKind::zf: return "zf";
    case PrecoderKind::wf: return "wf";
    case PrecoderKind::wfq: return "wfq";
    case PrecoderKind::qce: return "qce";
  }
  return "unknown";
}

PrecoderKind precoder_from_string(std::string_view name) {
  for (auto k : {PrecoderKind::mrt, PrecoderKind::zf, PrecoderKind::wf, PrecoderKind::wfq, PrecoderKind::qce})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown precoder '" + std::string(name) + "'");
}

}  // namespace eiprec::precode
