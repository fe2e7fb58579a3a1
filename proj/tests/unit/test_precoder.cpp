#include <doctest.h>

#include "eiprec/precoder.hpp"
#include "helpers.hpp"

using namespace eiprec;
using namespace eiprec::precode;

namespace {

ComplexMatrix gaussian(int rows, int cols, std::uint64_t seed, double variance = 1.0) {
  RandomStream rng(seed);
  return channel::gaussian_matrix(rows, cols, variance, rng);
}

DacConfig dac_bits(int bits) { return DacConfig{bits, false, 0.0}; }

}  // namespace

TEST_SUITE("precoder") {

TEST_CASE("bypass DACs give unit gains and no distortion") {
  const auto P = gaussian(64, 8, 1);
  const auto m = bussgang_model(P, DacConfig{4, true, 0.0}, 0.1, 8);
  CHECK((m.F.array() == 1.0).all());
  CHECK((m.sigma_d2.array() == 0.0).all());
  CHECK(m.output_gain == doctest::Approx(1.0));
  CHECK((m.sigma_m2 - P.rowwise().squaredNorm()).norm() < 1e-14);
}

TEST_CASE("Bussgang model bookkeeping") {
  ComplexMatrix P = gaussian(32, 4, 2);
  P.row(5).setZero();
  const double sigma2 = 0.05;
  const auto m = bussgang_model(P, dac_bits(3), sigma2, 4);
  CHECK(m.F(5) == 1.0);
  CHECK(m.sigma_d2(5) == 0.0);
  for (int i = 0; i < 32; ++i) {
    CHECK(m.F(i) > 0.0);
    CHECK(m.F(i) <= 1.0);
    CHECK(m.sigma_d2(i) >= 0.0);
    CHECK(m.sigma_d2(i) == doctest::Approx((1.0 - m.F(i)) * (4 * sigma2 + 1.0)));
  }
  CHECK_THROWS_AS(bussgang_model(ComplexMatrix::Zero(4, 2), dac_bits(3), sigma2, 2), DomainError);
}

TEST_CASE("quantizer cross-correlation is diagonal on a full-rank input") {
  const int A = 16, N = 100000;
  const auto P = gaussian(A, A, 3, 1.0 / A);
  const auto m = bussgang_model(P, dac_bits(3), 0.0, A);
  RandomStream rng(30);
  ComplexMatrix Rxz = ComplexMatrix::Zero(A, A), Rzz = ComplexMatrix::Zero(A, A);
  std::vector<quant::QuantizerSpec> specs;
  for (int i = 0; i < A; ++i) specs.push_back(dac_bits(3).spec_for(m.sigma_m2(i)));
  ComplexVector s(A), x(A);
  for (int t = 0; t < N; ++t) {
    for (auto& v : s) v = rng.complex_normal(1.0);
    const ComplexVector z = P * s;
    for (int i = 0; i < A; ++i) x(i) = quant::quantize(z(i), specs[static_cast<std::size_t>(i)]);
    Rxz.noalias() += x * z.adjoint();
    Rzz.noalias() += z * z.adjoint();
  }
  const ComplexMatrix F = Rxz * Rzz.inverse();
  double max_off = 0.0, min_diag = 1e300;
  for (int i = 0; i < A; ++i)
    for (int j = 0; j < A; ++j) {
      if (i == j) {
        min_diag = std::min(min_diag, std::abs(F(i, i)));
        CHECK(F(i, i).real() == doctest::Approx(m.F(i)).epsilon(0.01));
      } else {
        max_off = std::max(max_off, std::abs(F(i, j)));
      }
    }
  MESSAGE("max off-diagonal " << max_off << ", min diagonal " << min_diag);
  CHECK(max_off < 0.05 * min_diag);
}

TEST_CASE("diagonal gain explains the symbol correlation at 30 x 256") {
  const int U = 30, A = 256, N = 100000;
  const auto H = testutil::sample_channel(U, A, 4);
  const double sigma2 = 0.1 / A;
  const auto out = wf_precode(H, sigma2, 1.0);
  const auto m = bussgang_model(out.P, dac_bits(3), sigma2, U);
  std::vector<quant::QuantizerSpec> specs;
  for (int i = 0; i < A; ++i) specs.push_back(dac_bits(3).spec_for(m.sigma_m2(i)));
  RandomStream rng(40);
  ComplexMatrix Rxs = ComplexMatrix::Zero(A, U);
  RealVector cross = RealVector::Zero(A), energy = RealVector::Zero(A);
  ComplexVector s(U), x(A);
  for (int t = 0; t < N; ++t) {
    for (auto& v : s) v = rng.complex_normal(1.0);
    const ComplexVector z = out.P * s;
    for (int i = 0; i < A; ++i) {
      x(i) = quant::quantize(z(i), specs[static_cast<std::size_t>(i)]);
      cross(i) += (x(i) * std::conj(z(i))).real();
      energy(i) += std::norm(z(i));
    }
    Rxs.noalias() += x * s.adjoint();
  }
  Rxs /= static_cast<double>(N);
  const ComplexMatrix FP = m.F.asDiagonal() * out.P;
  CHECK((Rxs - FP).norm() / FP.norm() < 0.05);
  int within = 0;
  for (int i = 0; i < A; ++i) within += std::abs(cross(i) / energy(i) - m.F(i)) < 0.01 * m.F(i);
  CHECK(within == A);
}

TEST_CASE("Wiener filter tends to zero forcing without noise") {
  const auto H = gaussian(8, 8, 5);
  const auto out = wf_precode(H, 1e-14, 1.0);
  const ComplexMatrix HP = H * out.P;
  const Complex c = HP.trace() / 8.0;
  CHECK((HP - c * ComplexMatrix::Identity(8, 8)).norm() / (std::abs(c) * std::sqrt(8.0)) < 1e-6);
}

TEST_CASE("every precoder meets the power budget") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto H = testutil::sample_channel(30, 256, 100 + s);
    const double p = 0.5 + s;
    const double sigma2 = 0.01;
    CHECK(std::abs(wf_precode(H, sigma2, p).P.squaredNorm() - p) < 1e-10 * p);
    const auto wfq = wfq_precode(H, sigma2, p, dac_bits(3));
    CHECK(std::abs(wfq.output.P.squaredNorm() - p) < 1e-10 * p);
    for (auto k : {PrecoderKind::mrt, PrecoderKind::zf, PrecoderKind::qce}) {
      const auto out = baseline_precode(k, H, sigma2, p, dac_bits(3));
      CHECK(std::abs(out.P.squaredNorm() - p) < 1e-8 * p);
      CHECK(out.kind == k);
      CHECK(out.beta > 0.0);
    }
  }
}

TEST_CASE("WFQ with ideal DACs is the Wiener filter") {
  const auto H = testutil::sample_channel(30, 256, 6);
  const auto wf = wf_precode(H, 0.02, 1.0);
  const auto wfq = wfq_precode(H, 0.02, 1.0, DacConfig{4, true, 0.0});
  CHECK((wf.P - wfq.output.P).norm() == 0.0);
  CHECK(wf.beta == doctest::Approx(wfq.output.beta).epsilon(1e-14));
  CHECK(wfq.converged);
}

TEST_CASE("WFQ fixed-point residual decreases") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto H = testutil::sample_channel(30, 256, 200 + s);
    const auto res = wfq_precode(H, 0.1 / 256, 1.0, dac_bits(3));
    REQUIRE(res.residuals.size() >= 2);
    for (std::size_t i = 1; i < res.residuals.size(); ++i) CHECK(res.residuals[i] <= res.residuals[i - 1]);
    CHECK(res.converged);
    CHECK(res.iterations == static_cast<int>(res.residuals.size()));
  }
}

TEST_CASE("single-user MRT and ZF are collinear") {
  const auto h = gaussian(1, 16, 7);
  const auto mrt = baseline_precode(PrecoderKind::mrt, h, 0.1, 1.0, dac_bits(3));
  const auto zf = baseline_precode(PrecoderKind::zf, h, 0.1, 1.0, dac_bits(3));
  CHECK((mrt.P - h.adjoint() / h.norm()).norm() < 1e-12);
  CHECK((mrt.P - zf.P).norm() < 1e-12);
}

TEST_CASE("zero forcing removes interference and needs full rank") {
  const auto H = testutil::sample_channel(30, 256, 8);
  const auto zf = baseline_precode(PrecoderKind::zf, H, 0.1, 1.0, dac_bits(3));
  const ComplexMatrix HP = H * zf.P;
  const Complex c = HP.trace() / 30.0;
  CHECK((HP - c * ComplexMatrix::Identity(30, 30)).norm() / (std::abs(c) * std::sqrt(30.0)) < 1e-8);
  ComplexMatrix Hd = H;
  Hd.row(3) = Hd.row(4);
  CHECK_THROWS_AS(baseline_precode(PrecoderKind::zf, Hd, 0.1, 1.0, dac_bits(3)), NumericalError);
}

TEST_CASE("constant-envelope output has fixed modulus") {
  const auto H = testutil::sample_channel(8, 64, 9);
  const double p = 2.0;
  const auto qce = baseline_precode(PrecoderKind::qce, H, 0.05, p, dac_bits(3));
  const auto S = gaussian(8, 50, 10);
  const double amp = std::sqrt(p / 64.0);
  for (const auto& dac : {dac_bits(3), DacConfig{4, true, 0.0}}) {
    const auto X = transmit(qce, S, dac, p);
    CHECK((X.cwiseAbs().array() / amp - 1.0).abs().maxCoeff() < 1e-12);
  }
  CHECK(qce_map(Complex(1.0, 0.1), 2, 1.0) == Complex(std::cos(std::numbers::pi / 4), std::sin(std::numbers::pi / 4)));
}

TEST_CASE("transmit of the zero symbol gives the upper zero-input labels") {
  const auto H = testutil::sample_channel(4, 32, 11);
  const auto out = wf_precode(H, 0.1, 1.0);
  const auto dac = dac_bits(3);
  const auto m = bussgang_model(out.P, dac, 0.1, 4);
  const auto X = transmit(out, ComplexMatrix::Zero(4, 1), dac, 1.0);
  for (int i = 0; i < 32; ++i) {
    const double half = 0.5 * dac.spec_for(m.sigma_m2(i)).step * m.output_gain;
    CHECK(X(i, 0).real() == doctest::Approx(half));
    CHECK(X(i, 0).imag() == doctest::Approx(half));
  }
  const auto S = gaussian(4, 20, 12);
  CHECK((transmit(out, S, DacConfig{3, true, 0.0}, 1.0) - out.P * S).norm() == 0.0);
  CHECK_THROWS_AS(transmit(out, ComplexMatrix::Zero(5, 1), dac, 1.0), ShapeError);
}

TEST_CASE("radiated power after the DACs matches the budget") {
  const auto H = testutil::sample_channel(30, 256, 13);
  const auto out = wf_precode(H, 0.01, 1.0);
  for (int b : {1, 2, 3, 4}) {
    const auto X = transmit(out, gaussian(30, 20000, 14), dac_bits(b), 1.0);
    CHECK(X.squaredNorm() / 20000.0 == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("precoder names") {
  for (auto k : {PrecoderKind::mrt, PrecoderKind::zf, PrecoderKind::wf, PrecoderKind::wfq, PrecoderKind::qce})
    CHECK(precoder_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(precoder_from_string("mmse"), std::invalid_argument);
}

}  // TEST_SUITE
