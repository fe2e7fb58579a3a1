#pragma once

#include <vector>

#include "eiprec/types.hpp"

namespace eiprec::detail {

// Coefficients in ascending powers.
using Poly = std::vector<Complex>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, Complex s);
Complex poly_eval(const Poly& a, Complex x);
// Drops leading coefficients below rel_tol * max|coefficient|.
Poly poly_trim(Poly a, double rel_tol);
// Companion-matrix eigenvalues.
std::vector<Complex> poly_roots(const Poly& a);

}  // namespace eiprec::detail
