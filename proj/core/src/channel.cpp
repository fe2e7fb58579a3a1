#include "eiprec/channel.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

namespace eiprec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(master ^ splitmix64(index)) + stream);
}

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

Complex RandomStream::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

}  // namespace eiprec

namespace eiprec::channel {

double CorruptionModel::alpha() const {
  validate();
  return std::sqrt(eta * c / (1.0 - eta));
}

void CorruptionModel::validate() const {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
  if (!(c > 0.0)) throw DomainError("noise scale c must be positive");
}

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double variance, RandomStream& rng) {
  ComplexMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.complex_normal(variance);
  return M;
}

ComplexMatrix gen_channel(const SystemDims& dims, RandomStream& rng) {
  return gaussian_matrix(dims.users, dims.antennas, 1.0 / dims.antennas, rng);
}

ComplexMatrix corrupt(const ComplexMatrix& H, const CorruptionModel& model, RandomStream& rng) {
  model.validate();
  const ComplexMatrix E = gaussian_matrix(H.rows(), H.cols(), 1.0 / static_cast<double>(H.cols()), rng);
  if (model.mode == CorruptionMode::damped)
    return std::sqrt(1.0 - model.eta) * H + std::sqrt(model.eta * model.c) * E;
  return H + model.alpha() * E;
}

ComplexMatrix build_bsca(const ComplexMatrix& X) {
  if (X.rows() >= X.cols()) throw ShapeError("augmentation expects fewer rows than columns");
  const Eigen::Index u = X.rows();
  const Eigen::Index a = X.cols();
  ComplexMatrix B = ComplexMatrix::Zero(u + a, u + a);
  B.topRightCorner(u, a) = X;
  B.bottomLeftCorner(a, u) = X.adjoint();
  return B;
}

ComplexMatrix extract_channel(const ComplexMatrix& B, const SystemDims& dims) {
  if (B.rows() != dims.bsca_size() || B.cols() != dims.bsca_size())
    throw ShapeError("augmented matrix does not match the system dimensions");
  return B.topRightCorner(dims.users, dims.antennas);
}

ComplexMatrix normalize_observation(const ComplexMatrix& H_obs, double eta_hat) {
  if (!(eta_hat >= 0.0 && eta_hat < 1.0)) throw DomainError("eta_hat must lie in [0, 1)");
  return H_obs / std::sqrt(1.0 - eta_hat);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("truncated matrix stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_matrix(std::ostream& out, const ComplexMatrix& M) {
  put_u64(out, static_cast<std::uint64_t>(M.rows()));
  put_u64(out, static_cast<std::uint64_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      put_f64(out, M(i, j).real());
      put_f64(out, M(i, j).imag());
    }
  }
}

ComplexMatrix read_matrix(std::istream& in) {
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  if (rows > (1u << 20) || cols > (1u << 20)) throw std::runtime_error("matrix header out of range");
  ComplexMatrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      M(i, j) = {re, im};
    }
  }
  return M;
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& M) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_matrix(out, M);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace eiprec::channel
