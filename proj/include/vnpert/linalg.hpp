#pragma once

#include "vnpert/matrix.hpp"
#include "vnpert/tolerance.hpp"

namespace vnpert {

/// Largest singular value.
double operator_norm(const Matrix& x);

/// Unitary factor u of the polar decomposition x = u (x^* x)^{1/2}, computed
/// from the SVD.  Requires x square and numerically invertible.  When
/// ||x - I|| < 1 the output satisfies ||u - I|| <= sqrt(2) ||x - I||.
Matrix polar_unitary(const Matrix& x, const ToleranceProfile& tol = {});

/// Orthogonal projection onto the eigenspaces of (h + h^*)/2 with eigenvalue
/// in [lo, hi].  Eigenvalues within rank_eps of an endpoint trip a
/// spectral-gap error: the window only makes sense when the spectrum stays
/// clear of its boundary.
Matrix spectral_projection(const Matrix& h, double lo, double hi,
                           const ToleranceProfile& tol = {});

/// Unitary w with w p w^* = q and ||w - I|| <= sqrt(2) ||p - q||, built as the
/// polar unitary of q p + (I - q)(I - p).  Requires ||p - q|| < 1.
Matrix projection_exchange_unitary(const Matrix& p, const Matrix& q,
                                   const ToleranceProfile& tol = {});

}  // namespace vnpert
