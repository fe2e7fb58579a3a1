#pragma once

#include <string_view>
#include <vector>

#include "eiprec/quantizer.hpp"
#include "eiprec/types.hpp"

namespace eiprec::precode {

enum class PrecoderKind { mrt, zf, wf, wfq, qce };

// Per-antenna DAC rule. step <= 0 selects the Gaussian-optimal step for each antenna's input variance.
struct DacConfig {
  int bits = 4;
  bool bypass = false;
  double step = 0.0;

  quant::QuantizerSpec spec_for(double sigma_m2) const;
};

struct BussgangModel {
  RealVector F;
  // (1 - F) (U sigma^2 + 1), used in the WFQ regulariser.
  RealVector sigma_d2;
  RealVector sigma_m2;
  // E|Q(x_m)|^2 - F^2 sigma_m2, from the exact output-level distribution.
  RealVector distortion;
  // Scalar applied after the DACs so the radiated power equals tr(P P^H).
  double output_gain = 1.0;
};

BussgangModel bussgang_model(const ComplexMatrix& P, const DacConfig& dac, double sigma2, int users);
// Constant-envelope mapping with 2^bits phase sectors.
BussgangModel qce_model(const ComplexMatrix& P, int bits, double p_total);

struct PrecodeOutput {
  ComplexMatrix P;
  double beta = 1.0;
  PrecoderKind kind = PrecoderKind::wf;
};

struct WfqResult {
  PrecodeOutput output;
  BussgangModel model;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residuals;
};

PrecodeOutput wf_precode(const ComplexMatrix& H_hat, double sigma2, double p_total);
WfqResult wfq_precode(const ComplexMatrix& H_hat, double sigma2, double p_total, const DacConfig& dac,
                      int max_iterations = 10, double tolerance = 1e-6);
// MRT, ZF or QCE. QCE returns the WF matrix; the constant-envelope mapping happens in transmit.
PrecodeOutput baseline_precode(PrecoderKind kind, const ComplexMatrix& H_hat, double sigma2, double p_total,
                               const DacConfig& dac);

// Bussgang model for any precoder kind.
BussgangModel link_model(const PrecodeOutput& out, const DacConfig& dac, double sigma2, double p_total);

// argmin_beta E||s - beta (H z + n)||^2 under the Bussgang linearisation.
double receiver_scaling(const ComplexMatrix& H, const PrecodeOutput& out, const BussgangModel& model,
                        double sigma2);

// Columns of S are symbol vectors. Returns the radiated A x T block.
ComplexMatrix transmit(const PrecodeOutput& out, const ComplexMatrix& S, const DacConfig& dac, double p_total);

Complex qce_map(Complex x, int bits, double amplitude);

std::string_view to_string(PrecoderKind kind);
PrecoderKind precoder_from_string(std::string_view name);

}  // namespace eiprec::precode
