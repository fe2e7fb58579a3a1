#include <doctest.h>

#include <algorithm>

#include <Eigen/SVD>

#include "eiprec/rie.hpp"
#include "eiprec/rmt.hpp"
#include "helpers.hpp"

using namespace eiprec;
using namespace eiprec::rie;

namespace {

struct Pair {
  ComplexMatrix H, Ht;
};

Pair draw(int users, int antennas, double eta, std::uint64_t seed,
          channel::CorruptionMode mode = channel::CorruptionMode::additive) {
  RandomStream ch(derive_seed(seed, 0, 0)), noise(derive_seed(seed, 0, 1));
  Pair p;
  p.H = channel::gen_channel(SystemDims(users, antennas), ch);
  p.Ht = channel::corrupt(p.H, {eta, mode, 1.0}, noise);
  return p;
}

std::vector<double> to_vector(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("rie") {

TEST_CASE("rank-one augmentation has eigenvalues 3, -3 and zeros") {
  ComplexMatrix X = ComplexMatrix::Zero(2, 5);
  X(0, 1) = 3.0;
  const auto d = eig_bsca(channel::build_bsca(X));
  CHECK(d.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(d.eigenvalues(6) == doctest::Approx(-3.0));
  for (int i = 1; i < 6; ++i) CHECK(std::abs(d.eigenvalues(i)) < 1e-12);
  CHECK(d.null_count() == 5);
  CHECK(d.partner[0] == 6);
  CHECK(d.partner[6] == 0);
}

TEST_CASE("decomposition contract on random 30 x 256 inputs") {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto X = draw(30, 256, 0.3, s).Ht;
    const auto B = channel::build_bsca(X);
    const auto d = eig_bsca(B);
    const ComplexMatrix rebuilt = d.eigenvectors * d.eigenvalues.cast<Complex>().asDiagonal() * d.eigenvectors.adjoint();
    CHECK((rebuilt - B).norm() / B.norm() < 1e-10);
    CHECK((d.eigenvectors.adjoint() * d.eigenvectors - ComplexMatrix::Identity(286, 286)).norm() < 1e-10);
    for (int i = 0; i + 1 < 286; ++i) CHECK(d.eigenvalues(i) >= d.eigenvalues(i + 1));
    CHECK(d.null_count() == 226);

    const double scale = d.eigenvalues.cwiseAbs().maxCoeff();
    for (int i = 0; i < 286; ++i) {
      const int p = d.partner[static_cast<std::size_t>(i)];
      if (p < 0) continue;
      CHECK(d.partner[static_cast<std::size_t>(p)] == i);
      CHECK(std::abs(d.eigenvalues(i) + d.eigenvalues(p)) < 1e-8 * scale);
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(X);
    for (int k = 0; k < 30; ++k) {
      CHECK(std::abs(d.eigenvalues(k) - svd.singularValues()(k)) < 1e-10);
      CHECK(std::abs(d.eigenvalues(285 - k) + svd.singularValues()(k)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(eig_bsca(ComplexMatrix::Zero(3, 4)), ShapeError);
}

TEST_CASE("local_stieltjes hand example and decay") {
  const std::vector<double> eigs{1.0, 3.0};
  const auto g = local_stieltjes(eigs, std::size_t{0}, 1.0);
  CHECK(g.h == doctest::Approx(0.4));
  CHECK(g.rho == doctest::Approx(0.2));
  const auto by_value = local_stieltjes(eigs, 1.0, 1.0);
  CHECK(by_value.h == doctest::Approx(0.4));
  CHECK(by_value.rho == doctest::Approx(0.2));
  const auto far = local_stieltjes(eigs, std::size_t{0}, 1e8);
  CHECK(std::abs(far.h) < 1e-7);
  CHECK(std::abs(far.rho) < 1e-7);
  CHECK_THROWS_AS(local_stieltjes(eigs, std::size_t{0}, 0.0), DomainError);
  CHECK_THROWS_AS(local_stieltjes(eigs, std::size_t{2}, 1.0), std::out_of_range);
}

TEST_CASE("sample-averaged local Stieltjes tracks the analytic noisy law") {
  const double eta = 0.5, alpha = 1.0;
  const AspectRatio q(30.0 / 256.0);
  const double eps = 1.0 / std::sqrt(286.0);
  const std::vector<double> omegas{1.2, 1.6, 2.0, 2.4, 2.8};
  std::vector<Complex> avg(omegas.size());
  const int samples = 50;
  for (int s = 0; s < samples; ++s) {
    const auto eigs = testutil::gram_eigs(draw(30, 256, eta, 500 + s).Ht);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const auto ls = local_stieltjes(eigs, omegas[i], eps);
      avg[i] += Complex(ls.h, ls.rho) / static_cast<double>(samples);
    }
  }
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const Complex g = rmt::noisy_gram_stieltjes({omegas[i], eps}, q, alpha, rmt::NoisyGramLaw::gaussian_equivalent);
    CHECK(std::abs(avg[i] - g) < 5e-2);
  }
}

TEST_CASE("shrinkage at zero noise") {
  for (double w : {0.0, 0.3, 1.0, 2.5, 7.0}) {
    for (double h : {-0.7, 0.0, 0.4}) {
      const ShrinkageInputs in{w, h, 0.3, 0.2, 0.0};
      CHECK(shrink_eigenvalue(in, ShrinkVariant::anchored) == doctest::Approx(w));
      CHECK(shrink_eigenvalue(in, ShrinkVariant::printed) == doctest::Approx(std::max(w + h * w, 0.0)));
    }
  }
  CHECK(shrink_eigenvalue({1.0, 10.0, 0.0, 0.5, 2.0}, ShrinkVariant::anchored) >= 0.0);
  CHECK_THROWS_AS(shrink_eigenvalue({1.0, 0.0, 0.0, 0.5, -1.0}, ShrinkVariant::anchored), DomainError);
}

TEST_CASE("shrunk eigenvalues are closer to the truth than noisy ones") {
  const double eta = 0.5, alpha = 1.0, q = 30.0 / 256.0;
  double err_shrunk = 0.0, err_raw = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = draw(30, 256, eta, 900 + s);
    auto truth = testutil::gram_eigs(p.H);
    auto noisy = testutil::gram_eigs(p.Ht);
    const double eps = bandwidth(noisy, SystemDims(30, 256), Bandwidth::adaptive);
    std::vector<double> shrunk;
    for (std::size_t k = 0; k < noisy.size(); ++k) {
      const auto ls = local_stieltjes(noisy, k, eps);
      shrunk.push_back(shrink_eigenvalue({noisy[k], -ls.h, ls.rho, q, alpha}, ShrinkVariant::anchored));
    }
    std::sort(shrunk.begin(), shrunk.end());
    for (std::size_t k = 0; k < truth.size(); ++k) {
      err_shrunk += std::pow(shrunk[k] - truth[k], 2);
      err_raw += std::pow(noisy[k] - truth[k], 2);
    }
  }
  MESSAGE("eigenvalue MSE shrunk " << err_shrunk / 3000 << ", noisy " << err_raw / 3000);
  CHECK(err_shrunk < err_raw);
}

TEST_CASE("reconstruct identity, zero and pairing checks") {
  const SystemDims dims(30, 256);
  const auto X = draw(30, 256, 0.2, 4).Ht;
  const auto d = eig_bsca(channel::build_bsca(X));
  const auto eigs = to_vector(d.eigenvalues);
  CHECK((reconstruct(d, eigs, dims) - X).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(reconstruct(d, std::vector<double>(286, 0.0), dims).isZero(0.0));

  auto unpaired = eigs;
  unpaired[0] *= 0.5;
  CHECK_THROWS_AS(reconstruct(d, unpaired, dims), NumericalError);
  auto null_hit = eigs;
  null_hit[100] = 1.0;
  CHECK_THROWS_AS(reconstruct(d, null_hit, dims), NumericalError);
  CHECK_THROWS_AS(reconstruct(d, std::vector<double>(285, 0.0), dims), ShapeError);
}

TEST_CASE("clean_channel small-noise and floor checks") {
  const auto p0 = draw(20, 256, 0.3, 8);
  CHECK(clean_channel(p0.Ht, 0.0) == p0.Ht);

  const auto p1 = draw(20, 256, 0.1, 9);
  CHECK(mse(p1.H, clean_channel(p1.Ht, 0.1)) <= mse(p1.H, p1.Ht));

  double total = 0.0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const auto p = draw(20, 256, 0.5, 300 + t);
    total += mse(p.H, clean_channel(p.Ht, 0.5));
  }
  MESSAGE("mean cleaned MSE at eta 0.5 " << total / trials << " vs floor " << 0.5 / 256);
  CHECK(total / trials <= 1.5 * 0.5 / 256.0);
  CHECK_THROWS_AS(clean_channel(p0.Ht, 1.0), DomainError);
}

TEST_CASE("damped observations are cleaned after normalization") {
  const auto p = draw(20, 256, 0.5, 10, channel::CorruptionMode::damped);
  CleanerConfig cfg;
  cfg.observation = channel::CorruptionMode::damped;
  const auto direct = clean_channel(channel::normalize_observation(p.Ht, 0.5), 0.5);
  CHECK((clean_channel(p.Ht, 0.5, cfg) - direct).norm() < 1e-10 * direct.norm());
}

TEST_CASE("linear MMSE baseline") {
  const auto p0 = draw(20, 256, 0.0, 11, channel::CorruptionMode::damped);
  CHECK(linear_mmse_baseline(p0.Ht, 0.0) == p0.Ht);
  double acc = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto p = draw(30, 256, 0.5, 40 + t, channel::CorruptionMode::damped);
    acc += mse(p.H, linear_mmse_baseline(p.Ht, 0.5)) / 10.0;
  }
  CHECK(acc == doctest::Approx(0.5 / 256.0).epsilon(0.1));
  const auto p9 = draw(30, 256, 0.9, 12, channel::CorruptionMode::damped);
  CHECK(mse(p9.H, linear_mmse_baseline(p9.Ht, 0.9)) < mse(p9.H, p9.Ht));
}

TEST_CASE("mse bookkeeping") {
  const auto H = testutil::sample_channel(30, 256, 13);
  CHECK(mse(H, H) == 0.0);
  CHECK(mse(H, ComplexMatrix::Zero(30, 256)) == doctest::Approx(1.0 / 256.0).epsilon(0.05));
  CHECK_THROWS_AS(mse(H, ComplexMatrix::Zero(30, 255)), ShapeError);
}

TEST_CASE("cleaned MSE decreases with the antenna count") {
  double prev = std::numeric_limits<double>::infinity();
  for (int A : {32, 64, 128, 256}) {
    double acc = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto p = draw(20, A, 0.5, 1000 + t);
      acc += mse(p.H, clean_channel(p.Ht, 0.5)) / 20.0;
    }
    CHECK(acc < prev);
    prev = acc;
  }
}

TEST_CASE("cleaning keeps the singular vectors of the observation") {
  const auto p = draw(30, 256, 0.5, 14);
  const auto Hc = clean_channel(p.Ht, 0.5);
  Eigen::JacobiSVD<ComplexMatrix> svd(p.Ht, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const ComplexMatrix core = svd.matrixU().adjoint() * Hc * svd.matrixV();
  const ComplexMatrix off = core - ComplexMatrix(core.diagonal().asDiagonal());
  CHECK(off.norm() < 1e-8 * Hc.norm());
  const ComplexMatrix outside = Hc - Hc * svd.matrixV() * svd.matrixV().adjoint();
  CHECK(outside.norm() < 1e-8 * Hc.norm());
  for (int i = 0; i < 30; ++i) CHECK(core(i, i).real() >= -1e-12);
  CHECK(core.diagonal().imag().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("shrunk spectrum is sign symmetric with an intact null space") {
  const auto p = draw(30, 256, 0.4, 15);
  const auto Bc = channel::build_bsca(clean_channel(p.Ht, 0.4));
  auto eigs = testutil::hermitian_eigs(Bc);
  const double scale = std::max(std::abs(eigs.front()), std::abs(eigs.back()));
  int zeros = 0;
  for (double l : eigs) zeros += std::abs(l) < 1e-10 * scale;
  CHECK(zeros == 226);
  for (std::size_t i = 0; i < eigs.size(); ++i) CHECK(std::abs(eigs[i] + eigs[eigs.size() - 1 - i]) < 1e-8 * scale);
}

TEST_CASE("cleaning commutes with unitary rotations") {
  const auto p = draw(20, 64, 0.3, 16);
  const Complex phase = std::polar(1.0, 0.7);
  CHECK((clean_channel(phase * p.Ht, 0.3) - phase * clean_channel(p.Ht, 0.3)).norm() < 1e-10);
  RandomStream rng(17);
  const Eigen::HouseholderQR<ComplexMatrix> qr(channel::gaussian_matrix(64, 64, 1.0, rng));
  const ComplexMatrix Q = qr.householderQ();
  CHECK((clean_channel(p.Ht * Q, 0.3) - clean_channel(p.Ht, 0.3) * Q).norm() < 1e-10);
}

TEST_CASE("cleaned MSE beats the noisy observation in at least 95% of trials") {
  for (double eta : {0.1, 0.5, 0.9}) {
    int wins = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
      const auto p = draw(20, 256, eta, 2000 + t);
      wins += mse(p.H, clean_channel(p.Ht, eta)) <= mse(p.H, p.Ht);
    }
    INFO("eta " << eta);
    CHECK(wins >= 38);
  }
}

TEST_CASE("bandwidth rules") {
  const std::vector<double> eigs{1.0, 2.0, 3.0};
  CHECK(bandwidth(eigs, SystemDims(8, 64), Bandwidth::local_law) == doctest::Approx(1.0 / std::sqrt(72.0)));
  CHECK(bandwidth(eigs, SystemDims(8, 64), Bandwidth::adaptive) == doctest::Approx(2.0 / 2.0));
}

}  // TEST_SUITE

TEST_SUITE("rie_literal_examples") {

TEST_CASE("leave-one-out Stieltjes at eigenvalue points matches the analytic law") {
  const double alpha = 1.0;
  const AspectRatio q(30.0 / 256.0);
  const double eps = 1.0 / std::sqrt(286.0);
  const auto eigs = testutil::gram_eigs(draw(30, 256, 0.5, 77).Ht);
  double worst = 0.0;
  for (std::size_t k = 0; k < eigs.size(); ++k) {
    const auto ls = local_stieltjes(eigs, k, eps);
    const Complex g = rmt::noisy_gram_stieltjes({eigs[k], eps}, q, alpha, rmt::NoisyGramLaw::gaussian_equivalent);
    worst = std::max(worst, std::abs(Complex(ls.h, ls.rho) - g));
  }
  MESSAGE("largest deviation " << worst);
  CHECK(worst < 5e-2);
}

}  // TEST_SUITE
