#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eiprec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<Complex> candidates = {})
      : std::runtime_error(what), candidates_(std::move(candidates)) {}

  const std::vector<Complex>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<Complex> candidates_;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ratio users / antennas, strictly inside (0, 1).
class AspectRatio {
 public:
  explicit AspectRatio(double q);

  double value() const noexcept { return q_; }
  operator double() const noexcept { return q_; }

 private:
  double q_;
};

struct SystemDims {
  int users = 0;
  int antennas = 0;

  SystemDims() = default;
  SystemDims(int u, int a);

  AspectRatio q() const { return AspectRatio(static_cast<double>(users) / antennas); }
  int bsca_size() const noexcept { return users + antennas; }
};

}  // namespace eiprec
