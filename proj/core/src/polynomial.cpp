#include "polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace eiprec::detail {

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Complex{});
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_scale(b, -1.0)); }

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_scale(const Poly& a, Complex s) {
  Poly r(a);
  for (auto& c : r) c *= s;
  return r;
}

Complex poly_eval(const Poly& a, Complex x) {
  Complex acc{};
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly poly_trim(Poly a, double rel_tol) {
  double scale = 0.0;
  for (const auto& c : a) scale = std::max(scale, std::abs(c));
  while (!a.empty() && std::abs(a.back()) <= rel_tol * scale) a.pop_back();
  return a;
}

std::vector<Complex> poly_roots(const Poly& a) {
  const Poly p = poly_trim(a, 0.0);
  if (p.size() < 2) return {};
  const auto n = static_cast<Eigen::Index>(p.size() - 1);
  ComplexMatrix companion = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, false);
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

}  // namespace eiprec::detail
