#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vnpert/matrix.hpp"
#include "vnpert/rng.hpp"
#include "vnpert/tolerance.hpp"

namespace vnpert {

struct ContainsResult {
  bool member = false;
  double residual = 0.0;  // Frobenius distance to the span
};

struct AlgebraCheck {
  double gram = 0.0;             // || Gram - I ||
  double unital = 0.0;           // distance from I to the span
  double adjoint_closure = 0.0;  // max distance of b^* to the span
  double product_closure = 0.0;  // max distance of b_i b_j to the span
  double max() const;
  bool ok(const ToleranceProfile& tol) const;
};

// Coordinates used throughout: vec(x)/sqrt(n) in column-major order, so the
// standard dot product of coordinates equals tr(b^* a)/n.
Vector to_coord(const Matrix& x);
Matrix from_coord(const Vector& v, int n);

/// Unital *-closed subalgebra of the n x n matrices, held as a basis that is
/// orthonormal for the normalized-trace inner product.
class Subalgebra {
 public:
  Subalgebra() = default;

  static Subalgebra full(int n);
  static Subalgebra scalars(int n);
  static Subalgebra diagonal(int n);

  /// Multimatrix algebra: blocks (size k, multiplicity m) embedded
  /// block-diagonally as M_k (x) I_m.  If the blocks do not fill the space
  /// the leftover corner carries scalars, keeping the algebra unital.
  static Subalgebra block_algebra(int n, const std::vector<std::pair<int, int>>& shape);

  /// Wraps an already orthonormal basis (validated against tol.eq_eps).
  static Subalgebra from_orthonormal_basis(int n, std::vector<Matrix> basis,
                                           const ToleranceProfile& tol = {});

  /// Orthonormalized span of the generators; no closure under products.
  static Subalgebra span_of(int n, const std::vector<Matrix>& generators,
                            const ToleranceProfile& tol = {});

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  /// n^2 x dim matrix whose columns are the basis coordinates.
  const Matrix& coords() const { return coords_; }

  ContainsResult contains(const Matrix& x, const ToleranceProfile& tol = {}) const;
  /// Trace-orthogonal projection onto the span.
  Matrix project(const Matrix& x) const;
  Vector coefficients(const Matrix& x) const;
  Matrix from_coefficients(const Vector& c) const;
  /// The algebra u (.) u^* with the conjugated basis.
  Subalgebra conjugated(const Matrix& u) const;

  AlgebraCheck check_invariants() const;

  // File format: header "ambient_dim dim", then dim matrices in the shared
  // matrix text format.
  void save(std::ostream& os) const;
  void save(const std::string& path) const;
  static Subalgebra load(std::istream& is, const ToleranceProfile& tol = {});
  static Subalgebra load(const std::string& path, const ToleranceProfile& tol = {});

 private:
  Subalgebra(int n, std::vector<Matrix> basis);

  int ambient_dim_ = 0;
  std::vector<Matrix> basis_;
  Matrix coords_;  // cached coordinates of the basis
};

/// Smallest unital *-closed product-closed subspace containing the
/// generators, found by iterating {orthonormalize; append products and
/// adjoints} until the dimension stabilizes.
Subalgebra generate_algebra(int n, const std::vector<Matrix>& generators,
                            const ToleranceProfile& tol = {});

/// { x in L : x a = a x for all a in A }, the null space of the stacked
/// commutator maps over A's basis inside span(L).  Requires A inside L.
Subalgebra relative_commutant(const Subalgebra& A, const Subalgebra& L,
                              const ToleranceProfile& tol = {});

/// exp(i h) for a random Hermitian h in the span, coefficients at scale
/// `spread`.
Matrix sample_unitary(const Subalgebra& A, std::uint64_t rng_seed, double spread,
                      const ToleranceProfile& tol = {});

/// Haar-distributed unitary of A: the polar unitary of a Gaussian element of
/// the span.  Left-invariance of the construction makes the law Haar.
Matrix haar_unitary(const Subalgebra& A, Rng& rng, const ToleranceProfile& tol = {});

/// Subalgebra of the 2n x 2n matrices whose four n x n blocks lie in L.
Subalgebra amplify_2x2(const Subalgebra& L);

}  // namespace vnpert
