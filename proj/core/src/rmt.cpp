#include "eiprec/rmt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "polynomial.hpp"

namespace eiprec {

AspectRatio::AspectRatio(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("aspect ratio must lie in (0, 1)");
}

SystemDims::SystemDims(int u, int a) : users(u), antennas(a) {
  if (u <= 0 || a <= 0) throw DomainError("dimensions must be positive");
  if (u >= a) throw DomainError("users must be fewer than antennas");
}

}  // namespace eiprec

namespace eiprec::rmt {

namespace {

constexpr double kPi = std::numbers::pi;

void require_off_axis(Complex z) {
  if (z.imag() == 0.0) throw DomainError("Stieltjes evaluation on the real axis needs an explicit eps");
}

// Both roots of a z g^2 + b g + 1 = 0, computed without cancellation.
std::array<Complex, 2> unit_constant_quadratic(Complex a, Complex b) {
  const Complex disc = std::sqrt(b * b - 4.0 * a);
  const double s = std::real(std::conj(b) * disc) >= 0.0 ? 1.0 : -1.0;
  const Complex t = -0.5 * (b + s * disc);
  return {t / a, 1.0 / t};
}

Complex pick_herglotz(const std::array<Complex, 2>& roots, Complex z) {
  const Complex target = -1.0 / z;
  const auto herglotz = [&](Complex g) { return g.imag() * z.imag() > 0.0; };
  const bool h0 = herglotz(roots[0]);
  const bool h1 = herglotz(roots[1]);
  if (h0 != h1) return h0 ? roots[0] : roots[1];
  return std::abs(roots[0] - target) <= std::abs(roots[1] - target) ? roots[0] : roots[1];
}

Complex aux_radical(Complex w, double q) {
  const Complex w2 = w * w;
  return std::sqrt(1.0 + (4.0 - 2.0 * q) * w2 + q * q * w2 * w2);
}

Complex aux_radicand(Complex w, double q) {
  const Complex w2 = w * w;
  return 1.0 + (4.0 - 2.0 * q) * w2 + q * q * w2 * w2;
}


}  // namespace

Complex mp_stieltjes(Complex z, AspectRatio q) {
  require_off_axis(z);
  const double qv = q.value();
  return pick_herglotz(unit_constant_quadratic(qv * z, z + qv - 1.0), z);
}

Complex mp_stieltjes_boundary(double x, AspectRatio q, double eps) {
  if (!(eps > 0.0)) throw DomainError("boundary evaluation needs eps > 0");
  return mp_stieltjes(Complex(x, eps), q);
}

double mp_stieltjes_real(double x, AspectRatio q) {
  const double qv = q.value();
  const double lo = std::pow(1.0 - std::sqrt(qv), 2);
  const double hi = std::pow(1.0 + std::sqrt(qv), 2);
  if (x == 0.0 || (x >= lo && x <= hi)) throw DomainError("real-axis point lies on the support");
  const Complex zc(x, 0.0);
  const Complex g = (-(zc + qv - 1.0) + std::sqrt(zc - hi) * std::sqrt(zc - lo)) / (2.0 * qv * zc);
  return g.real();
}

double mp_density(double x, AspectRatio q) {
  const double qv = q.value();
  const double lo = std::pow(1.0 - std::sqrt(qv), 2);
  const double hi = std::pow(1.0 + std::sqrt(qv), 2);
  if (x <= lo || x >= hi) return 0.0;
  return std::sqrt((hi - x) * (x - lo)) / (2.0 * kPi * qv * x);
}

double bsca_density(double x, AspectRatio q) {
  const double qv = q.value();
  const double a = 1.0 - std::sqrt(qv);
  const double b = 1.0 + std::sqrt(qv);
  const double ax = std::abs(x);
  if (ax < a || ax > b) return 0.0;
  const double rad = (b * b - x * x) * (x * x - a * a);
  if (rad <= 0.0) return 0.0;
  return std::sqrt(rad) / ((qv + 1.0) * kPi * ax);
}

SupportInterval bsca_support(AspectRatio q) {
  const double qv = q.value();
  return {1.0 - std::sqrt(qv), 1.0 + std::sqrt(qv), (1.0 - qv) / (1.0 + qv)};
}

Complex stieltjes_d_from_gram(Complex g_gram, Complex z, AspectRatio q) {
  if (z == Complex{}) throw DomainError("z = 0");
  const double qv = q.value();
  return (2.0 * qv / (qv + 1.0)) * g_gram + ((qv - 1.0) / (qv + 1.0)) / z;
}

Complex stieltjes_gram_from_d(Complex g_d, Complex z, AspectRatio q) {
  if (z == Complex{}) throw DomainError("z = 0");
  const double qv = q.value();
  return ((qv + 1.0) / (2.0 * qv)) * g_d - ((qv - 1.0) / (2.0 * qv)) / z;
}

Complex stieltjes_b_from_d(Complex g_d_at_z2, Complex z) { return z * g_d_at_z2; }

double s_transform_gram(double z, AspectRatio q) {
  const double den = 1.0 + q.value() * z;
  if (den == 0.0) throw DomainError("S transform pole");
  return 1.0 / den;
}

double s_transform_d(double z, AspectRatio q) {
  const double qv = q.value();
  const double c = 2.0 * qv / (1.0 + qv);
  const double den = (c + z) * (c + qv * z);
  if (den == 0.0) throw DomainError("S transform pole");
  return (1.0 + z) * c / den;
}

double s_transform_bsca(double z, AspectRatio q) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("S transform of the augmented law is real only for z > 0");
  return std::sqrt((1.0 + z) / z * s_transform_d(z, q));
}

double m_transform_bsca(double w, AspectRatio q) {
  const double b = 1.0 + std::sqrt(q.value());
  if (w < 0.0 || w >= 1.0 / b) throw DomainError("M transform evaluated outside (0, 1/b)");
  if (w == 0.0) return 0.0;
  const double u = w * w;
  const double qv = q.value();
  const double c = 2.0 * qv / (1.0 + qv);
  const double m_gram = -1.0 - mp_stieltjes_real(1.0 / u, q) / u;
  return c * m_gram;
}

double s_transform_bsca_via_m(double z, AspectRatio q) {
  if (!(z > 0.0)) throw DomainError("S transform of the augmented law is real only for z > 0");
  const double w_max = 1.0 / (1.0 + std::sqrt(q.value()));
  const double w_hi = w_max * (1.0 - 1e-14);
  if (z >= m_transform_bsca(w_hi, q)) throw DomainError("z beyond the range of the M transform");
  const auto f = [&](double w) { return m_transform_bsca(w, q) - z; };
  std::uintmax_t iters = 200;
  const auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 1e-15 * std::max(1.0, std::abs(hi)); };
  const auto bracket = boost::math::tools::toms748_solve(f, 0.0, w_hi, -z, f(w_hi), tol, iters);
  const double w = 0.5 * (bracket.first + bracket.second);
  return w * (1.0 + z) / z;
}

namespace {

// Roots in G (standard convention) of the radical-free form of the noisy-Gram equation,
// solved in u = zG so the coefficients stay O(1) for large |z|.
std::vector<Complex> theorem_polynomial_roots(Complex z, double qv, double a2) {
  using detail::Poly;
  const Complex iz = 1.0 / z;
  const Poly p1{1.0, 0.0, (4.0 - 2.0 * qv) * iz, 0.0, qv * qv * iz * iz};
  const Poly p2{1.0, 0.0, (4.0 - 2.0 * qv) * a2 * iz, 0.0, qv * qv * a2 * a2 * iz * iz};
  const Poly lin{0.0, 2.0, -(1.0 + a2) * qv * iz};
  const Poly inner = detail::poly_sub(detail::poly_sub(detail::poly_mul(lin, lin), p1), p2);
  const Poly full = detail::poly_trim(
      detail::poly_sub(detail::poly_mul(inner, inner), detail::poly_scale(detail::poly_mul(p1, p2), 4.0)), 1e-11);
  auto roots = detail::poly_roots(full);
  for (Complex& r : roots) r *= iz;
  return roots;
}

// Residual with the radical signs that make it smallest; the squared form admits all four.
double signed_residual(Complex G, Complex z, double qv, double a2) {
  const Complex G2 = G * G;
  const Complex s1 = std::sqrt(1.0 + (4.0 - 2.0 * qv) * z * G2 + qv * qv * z * z * G2 * G2);
  const Complex s2 = std::sqrt(1.0 + (4.0 - 2.0 * qv) * a2 * z * G2 + qv * qv * a2 * a2 * z * z * G2 * G2);
  const Complex base = -2.0 * G * z + G2 * (1.0 + a2) * qv * z;
  double best = std::numeric_limits<double>::infinity();
  for (double e1 : {1.0, -1.0})
    for (double e2 : {1.0, -1.0}) best = std::min(best, std::abs(base + e1 * s1 + e2 * s2));
  return best / (1.0 + std::abs(2.0 * G * z));
}

// Points from far out along the ray through z down to z itself.
std::vector<Complex> continuation_path(Complex z, int steps = 80) {
  const double r0 = std::max(1e3, 100.0 * std::abs(z));
  const double ratio = r0 / std::abs(z);
  std::vector<Complex> path;
  for (int k = 0; k <= steps; ++k) path.push_back(z * std::pow(ratio, 1.0 - static_cast<double>(k) / steps));
  return path;
}

}  // namespace

Complex noisy_gram_stieltjes_polynomial(Complex z, AspectRatio q, double alpha) {
  require_off_axis(z);
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  if (z.imag() < 0.0) return std::conj(noisy_gram_stieltjes_polynomial(std::conj(z), q, alpha));
  const double qv = q.value();
  const double a2 = alpha * alpha;

  // Follow the root that behaves as 1/z at infinity; it stays on the Herglotz branch along the ray.
  const auto path = continuation_path(z);
  Complex G = 1.0 / path.front();
  std::vector<Complex> roots;
  for (Complex zk : path) {
    roots = theorem_polynomial_roots(zk, qv, a2);
    Complex next = G;
    double best = std::numeric_limits<double>::infinity();
    for (Complex r : roots) {
      if (!(r.imag() < 0.0)) continue;
      if (std::abs(r - G) < best) {
        best = std::abs(r - G);
        next = r;
      }
    }
    if (!std::isfinite(best)) break;
    G = next;
  }
  std::vector<Complex> candidates;
  for (Complex r : roots) candidates.push_back(-r);
  if (!(G.imag() < 0.0) || !(signed_residual(G, z, qv, a2) < 1e-9))
    throw NumericalError("no root of the noisy-Gram equation on the Herglotz branch", candidates);
  return -G;
}

Complex noisy_gram_stieltjes_fixed_point(Complex z, AspectRatio q, double alpha, const FixedPointOptions& opts) {
  require_off_axis(z);
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  if (z.imag() < 0.0) return std::conj(noisy_gram_stieltjes_fixed_point(std::conj(z), q, alpha, opts));
  const auto map = [&](Complex w, Complex zeta) { return 1.0 / (zeta - r_transform_noisy_aux(w, q, alpha)); };

  Complex zeta = std::sqrt(z);
  Complex w = 1.0 / zeta;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Complex next = (1.0 - opts.damping) * w + opts.damping * map(w, zeta);
    if (std::abs(next - w) <= opts.tolerance * std::max(1.0, std::abs(w))) return -next / zeta;
    w = next;
  }

  // Damped iteration stalled: Newton on w - map(w) along the continuation path, with both
  // radicals of R followed continuously instead of taken on the principal branch.
  const double qv = q.value();
  Complex s1 = 1.0, s2 = 1.0;
  const auto tracked = [&](Complex w_, Complex zeta_, Complex& r1, Complex& r2) {
    Complex t1 = std::sqrt(aux_radicand(w_, qv));
    Complex t2 = std::sqrt(aux_radicand(alpha * w_, qv));
    if (std::abs(t1 + s1) < std::abs(t1 - s1)) t1 = -t1;
    if (std::abs(t2 + s2) < std::abs(t2 - s2)) t2 = -t2;
    r1 = t1;
    r2 = t2;
    const Complex R = (-1.0 + qv * w_ * w_ + t1) / (2.0 * w_) + (-1.0 + qv * alpha * alpha * w_ * w_ + t2) / (2.0 * w_);
    return w_ - 1.0 / (zeta_ - R);
  };
  const auto path = continuation_path(z);
  w = 1.0 / std::sqrt(path.front());
  Complex r1, r2;
  for (Complex zk : path) {
    zeta = std::sqrt(zk);
    for (int it = 0; it < 50; ++it) {
      const double h = 1e-7 * std::max(1.0, std::abs(w));
      const Complex f = tracked(w, zeta, r1, r2);
      const Complex df = (tracked(w + h, zeta, r1, r2) - tracked(w - h, zeta, r1, r2)) / (2.0 * h);
      const Complex step = f / df;
      w -= step;
      tracked(w, zeta, r1, r2);
      s1 = r1;
      s2 = r2;
      if (std::abs(step) <= opts.tolerance * std::max(1.0, std::abs(w))) break;
    }
  }
  if (!(std::abs(tracked(w, zeta, r1, r2)) <= 1e3 * opts.tolerance * std::max(1.0, std::abs(w))) ||
      !((-w / zeta).imag() > 0.0))
    throw NumericalError("free-convolution fixed point did not converge", {-w / zeta});
  return -w / zeta;
}

const TheoremConsistency& theorem_consistency() {
  static const TheoremConsistency result = [] {
    TheoremConsistency tc;
    const std::array<double, 3> qs{0.1, 0.25, 0.5};
    const std::array<Complex, 5> zs{Complex(0.5, 0.3), Complex(1.0, 0.1), Complex(2.0, 0.5), Complex(3.0, 0.05),
                                    Complex(-1.0, 0.2)};
    for (double qv : qs) {
      for (Complex z : zs) {
        const AspectRatio q(qv);
        const Complex ref = mp_stieltjes(z, q);
        try {
          tc.polynomial_deviation =
              std::max(tc.polynomial_deviation, std::abs(noisy_gram_stieltjes_polynomial(z, q, 0.0) - ref));
        } catch (const NumericalError&) {
          tc.polynomial_deviation = std::numeric_limits<double>::infinity();
        }
        try {
          tc.fixed_point_deviation =
              std::max(tc.fixed_point_deviation, std::abs(noisy_gram_stieltjes_fixed_point(z, q, 0.0) - ref));
        } catch (const NumericalError&) {
          tc.fixed_point_deviation = std::numeric_limits<double>::infinity();
        }
      }
    }
    if (tc.polynomial_deviation > 1e-8 && tc.fixed_point_deviation <= 1e-8)
      tc.selected = TheoremEvaluator::fixed_point;
    return tc;
  }();
  return result;
}

Complex noisy_gram_stieltjes(Complex z, AspectRatio q, double alpha, NoisyGramLaw law) {
  require_off_axis(z);
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  if (law == NoisyGramLaw::gaussian_equivalent) {
    const double s = 1.0 + alpha * alpha;
    return mp_stieltjes(z / s, q) / s;
  }
  if (theorem_consistency().selected == TheoremEvaluator::fixed_point)
    return noisy_gram_stieltjes_fixed_point(z, q, alpha);
  return noisy_gram_stieltjes_polynomial(z, q, alpha);
}

Complex r_transform_bsca_aux(Complex w, AspectRatio q) {
  if (w == Complex{}) return {};
  if (std::abs(aux_radicand(w, q.value())) < 1e-14) throw DomainError("R transform branch point");
  const double qv = q.value();
  return (-1.0 + qv * w * w + aux_radical(w, qv)) / (2.0 * w);
}

Complex r_transform_noisy_aux(Complex w, AspectRatio q, double alpha, AuxRVariant variant) {
  const double qv = q.value();
  if (std::abs(aux_radicand(w, qv)) < 1e-14 || std::abs(aux_radicand(alpha * w, qv)) < 1e-14)
    throw DomainError("R transform branch point");
  if (variant == AuxRVariant::printed) {
    if (w == Complex{}) throw DomainError("printed form has a pole at 0");
    return (-1.0 + qv * w * w + aux_radical(w, qv) + aux_radical(alpha * w, qv)) / (2.0 * w);
  }
  if (w == Complex{}) return {};
  const Complex clean = (-1.0 + qv * w * w + aux_radical(w, qv)) / (2.0 * w);
  const Complex noise = (-1.0 + qv * alpha * alpha * w * w + aux_radical(alpha * w, qv)) / (2.0 * w);
  return clean + noise;
}

Complex empirical_stieltjes(std::span<const double> eigs, Complex z) {
  if (eigs.empty()) throw std::invalid_argument("empty eigenvalue list");
  require_off_axis(z);
  Complex acc{};
  for (double l : eigs) acc += 1.0 / (l - z);
  return acc / static_cast<double>(eigs.size());
}

CumulantTriple free_cumulants(const MomentTriple& m) {
  return {m.m1, m.m2 - m.m1 * m.m1, m.m3 - 3.0 * m.m2 * m.m1 + 2.0 * m.m1 * m.m1 * m.m1};
}

CumulantTriple free_cumulants_printed(const MomentTriple& m) {
  return {m.m1, m.m2 - m.m1 * m.m1, m.m3 - 3.0 * m.m2 * m.m1 + 2.0 * m.m1 * m.m1};
}

MomentTriple moments_from_cumulants(const CumulantTriple& k) {
  return {k.k1, k.k2 + k.k1 * k.k1, k.k3 + 3.0 * k.k1 * k.k2 + k.k1 * k.k1 * k.k1};
}

CumulantTriple noisy_gram_cumulants_theory(double eta, AspectRatio q, TheoryMode mode, double c) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
  const double qv = q.value();
  if (mode == TheoryMode::paper) {
    const double r = 1.0 - eta;
    return {1.0 / r, (2.0 * r * eta * (1.0 - qv) + qv) / (r * r),
            qv * (3.0 * r * eta * (1.0 - qv) + qv) / (r * r * r)};
  }
  const double s = 1.0 + eta * c / (1.0 - eta);
  return {s, qv * s * s, qv * qv * s * s * s};
}

}  // namespace eiprec::rmt
