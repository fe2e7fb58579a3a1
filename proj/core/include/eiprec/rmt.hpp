#pragma once

#include <span>
#include <vector>

#include "eiprec/types.hpp"

// Spectral transforms use the convention g(z) = ∫ ρ(λ) / (λ − z) dλ, so g(z) ~ −1/z
// at infinity and Im g has the sign of Im z.
namespace eiprec::rmt {

struct SupportInterval {
  double a = 0.0;
  double b = 0.0;
  double zero_atom = 0.0;
};

struct MomentTriple {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};

struct CumulantTriple {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

enum class TheoryMode { paper, gaussian_equivalent };

// free_sum: free additive convolution of the clean and scaled-noise augmented laws.
// gaussian_equivalent: Marchenko-Pastur scaled by s = 1 + alpha^2.
enum class NoisyGramLaw { free_sum, gaussian_equivalent };

enum class TheoremEvaluator { polynomial, fixed_point };

enum class AuxRVariant { additive, printed };

Complex mp_stieltjes(Complex z, AspectRatio q);
// Evaluates at x + i*eps.
Complex mp_stieltjes_boundary(double x, AspectRatio q, double eps);
// Real-axis value off the support [a^2, b^2] and away from 0.
double mp_stieltjes_real(double x, AspectRatio q);
double mp_density(double x, AspectRatio q);

double bsca_density(double x, AspectRatio q);
SupportInterval bsca_support(AspectRatio q);

Complex stieltjes_d_from_gram(Complex g_gram, Complex z, AspectRatio q);
Complex stieltjes_gram_from_d(Complex g_d, Complex z, AspectRatio q);
Complex stieltjes_b_from_d(Complex g_d_at_z2, Complex z);

double s_transform_gram(double z, AspectRatio q);
double s_transform_d(double z, AspectRatio q);
// Real-valued for z > 0 only.
double s_transform_bsca(double z, AspectRatio q);
double m_transform_bsca(double w, AspectRatio q);
double s_transform_bsca_via_m(double z, AspectRatio q);

Complex noisy_gram_stieltjes(Complex z, AspectRatio q, double alpha,
                             NoisyGramLaw law = NoisyGramLaw::free_sum);
Complex noisy_gram_stieltjes_polynomial(Complex z, AspectRatio q, double alpha);

struct FixedPointOptions {
  double damping = 0.5;
  double tolerance = 1e-10;
  int max_iterations = 5000;
};
Complex noisy_gram_stieltjes_fixed_point(Complex z, AspectRatio q, double alpha,
                                         const FixedPointOptions& opts = {});

struct TheoremConsistency {
  double polynomial_deviation = 0.0;
  double fixed_point_deviation = 0.0;
  TheoremEvaluator selected = TheoremEvaluator::polynomial;
};
// Compares both evaluators against mp_stieltjes at alpha = 0; computed once.
const TheoremConsistency& theorem_consistency();

Complex r_transform_bsca_aux(Complex w, AspectRatio q);
Complex r_transform_noisy_aux(Complex w, AspectRatio q, double alpha,
                              AuxRVariant variant = AuxRVariant::additive);

Complex empirical_stieltjes(std::span<const double> eigs, Complex z);

CumulantTriple free_cumulants(const MomentTriple& m);
CumulantTriple free_cumulants_printed(const MomentTriple& m);
MomentTriple moments_from_cumulants(const CumulantTriple& k);

CumulantTriple noisy_gram_cumulants_theory(double eta, AspectRatio q, TheoryMode mode,
                                           double c = 1.0);

}  // namespace eiprec::rmt
