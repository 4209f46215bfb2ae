#include "vnpert/subalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vnpert/errors.hpp"
#include "vnpert/kernels.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

Vector to_coord(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  return Eigen::Map<const Vector>(x.data(), x.size()) / std::sqrt(n);
}

Matrix from_coord(const Vector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n)
    fail(ErrorKind::invalid_input, "from_coord: size mismatch");
  Matrix x = Eigen::Map<const Matrix>(v.data(), n, n);
  return x * std::sqrt(static_cast<double>(n));
}

double AlgebraCheck::max() const {
  return std::max({gram, unital, adjoint_closure, product_closure});
}

bool AlgebraCheck::ok(const ToleranceProfile& tol) const { return max() <= tol.eq_eps; }

namespace {

// Residual of the candidate block after projecting out the (orthonormal)
// basis columns.  One batch pass is enough for the keep/drop decision; the
// kept vectors are reorthogonalized individually below.
Matrix project_out(const Matrix& basis, Matrix candidates) {
  if (basis.cols() == 0) return candidates;
  candidates.noalias() -= basis * (basis.adjoint() * candidates).eval();
  return candidates;
}

// Pivoted Gram-Schmidt over the residual columns.  Columns whose residual
// falls below drop * max(1, original norm) are eliminated; the survivors are
// appended one by one, largest first.
Matrix pivoted_extension(const Matrix& basis, const Matrix& candidates, double drop) {
  Matrix residual = project_out(basis, candidates);
  const Eigen::Index count = residual.cols();
  Eigen::VectorXd threshold(count);
  for (Eigen::Index j = 0; j < count; ++j)
    threshold(j) = drop * std::max(1.0, candidates.col(j).norm());

  Matrix added(residual.rows(), 0);
  while (true) {
    int best = -1;
    double best_norm = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      const double norm = residual.col(j).norm();
      if (norm > threshold(j) && norm > best_norm) {
        best_norm = norm;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;

    Vector v = residual.col(best) / best_norm;
    for (int sweep = 0; sweep < 2; ++sweep) {  // twice is enough
      if (basis.cols() > 0) v -= basis * (basis.adjoint() * v).eval();
      if (added.cols() > 0) v -= added * (added.adjoint() * v).eval();
    }
    const double renorm = v.norm();
    if (renorm <= drop) {  // candidate has collapsed; kill and continue
      residual.col(best).setZero();
      threshold(best) = std::numeric_limits<double>::infinity();
      continue;
    }
    v /= renorm;

    added.conservativeResize(Eigen::NoChange, added.cols() + 1);
    added.col(added.cols() - 1) = v;
    residual.noalias() -= v * (v.adjoint() * residual).eval();
  }
  return added;
}

std::vector<Matrix> columns_to_matrices(const Matrix& coords, int n) {
  std::vector<Matrix> out;
  out.reserve(coords.cols());
  for (Eigen::Index j = 0; j < coords.cols(); ++j) out.push_back(from_coord(coords.col(j), n));
  return out;
}

Matrix matrices_to_columns(const std::vector<Matrix>& mats, int n) {
  Matrix coords(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t j = 0; j < mats.size(); ++j) coords.col(static_cast<Eigen::Index>(j)) = to_coord(mats[j]);
  return coords;
}

void require_ambient(const Matrix& x, int n, const char* who) {
  require_finite(x, who);
  if (x.rows() != n || x.cols() != n) {
    std::ostringstream msg;
    msg << who << ": expected " << n << "x" << n << " matrix, got " << x.rows() << "x"
        << x.cols();
    fail(ErrorKind::invalid_input, msg.str());
  }
}

}  // namespace

Subalgebra::Subalgebra(int n, std::vector<Matrix> basis)
    : ambient_dim_(n), basis_(std::move(basis)) {
  coords_ = matrices_to_columns(basis_, n);
}

Subalgebra Subalgebra::full(int n) {
  if (n <= 0) fail(ErrorKind::invalid_input, "Subalgebra::full: dimension must be positive");
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix b = Matrix::Zero(n, n);
      b(i, j) = scale;
      basis.push_back(std::move(b));
    }
  return Subalgebra(n, std::move(basis));
}

Subalgebra Subalgebra::scalars(int n) {
  if (n <= 0) fail(ErrorKind::invalid_input, "Subalgebra::scalars: dimension must be positive");
  return Subalgebra(n, {Matrix::Identity(n, n)});
}

Subalgebra Subalgebra::diagonal(int n) {
  return block_algebra(n, std::vector<std::pair<int, int>>(n, {1, 1}));
}

Subalgebra Subalgebra::block_algebra(int n, const std::vector<std::pair<int, int>>& shape) {
  if (n <= 0) fail(ErrorKind::invalid_input, "block_algebra: dimension must be positive");
  int used = 0;
  for (auto [k, m] : shape) {
    if (k <= 0 || m <= 0) fail(ErrorKind::invalid_input, "block_algebra: nonpositive block");
    used += k * m;
  }
  if (used > n) fail(ErrorKind::invalid_input, "block_algebra: blocks exceed the ambient dimension");

  std::vector<Matrix> basis;
  int offset = 0;
  auto add_block = [&](int k, int m) {
    const double scale = std::sqrt(static_cast<double>(n) / m);
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        Matrix b = Matrix::Zero(n, n);
        for (int j = 0; j < m; ++j) b(offset + r * m + j, offset + s * m + j) = scale;
        basis.push_back(std::move(b));
      }
    offset += k * m;
  };
  for (auto [k, m] : shape) add_block(k, m);
  if (offset < n) add_block(1, n - offset);  // scalar action on the leftover corner
  return Subalgebra(n, std::move(basis));
}

Subalgebra Subalgebra::from_orthonormal_basis(int n, std::vector<Matrix> basis,
                                              const ToleranceProfile& tol) {
  if (basis.empty()) fail(ErrorKind::invalid_input, "from_orthonormal_basis: empty basis");
  for (const auto& b : basis) require_ambient(b, n, "from_orthonormal_basis");
  Subalgebra a(n, std::move(basis));
  const Matrix gram = a.coords_.adjoint() * a.coords_;
  const double defect =
      (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect > tol.eq_eps) {
    std::ostringstream msg;
    msg << "from_orthonormal_basis: Gram defect " << defect << " above eq_eps";
    fail(ErrorKind::invalid_input, msg.str());
  }
  return a;
}

Subalgebra Subalgebra::span_of(int n, const std::vector<Matrix>& generators,
                               const ToleranceProfile& tol) {
  for (const auto& g : generators) require_ambient(g, n, "span_of");
  const Matrix candidates = matrices_to_columns(generators, n);
  const Matrix coords = pivoted_extension(Matrix(static_cast<Eigen::Index>(n) * n, 0),
                                          candidates, tol.rank_eps);
  if (coords.cols() == 0) fail(ErrorKind::invalid_input, "span_of: span collapsed to zero");
  return Subalgebra(n, columns_to_matrices(coords, n));
}

ContainsResult Subalgebra::contains(const Matrix& x, const ToleranceProfile& tol) const {
  require_ambient(x, ambient_dim_, "contains");
  const Vector v = to_coord(x);
  const Vector residual = v - coords_ * (coords_.adjoint() * v).eval();
  // coordinates carry the 1/sqrt(n) scaling; undo it for a Frobenius distance
  const double dist = residual.norm() * std::sqrt(static_cast<double>(ambient_dim_));
  return {dist <= tol.eq_eps * (1.0 + x.norm()), dist};
}

Matrix Subalgebra::project(const Matrix& x) const {
  require_ambient(x, ambient_dim_, "project");
  const Vector v = to_coord(x);
  return from_coord(coords_ * (coords_.adjoint() * v).eval(), ambient_dim_);
}

Vector Subalgebra::coefficients(const Matrix& x) const {
  require_ambient(x, ambient_dim_, "coefficients");
  return coords_.adjoint() * to_coord(x);
}

Matrix Subalgebra::from_coefficients(const Vector& c) const {
  if (c.size() != dim()) fail(ErrorKind::invalid_input, "from_coefficients: size mismatch");
  return from_coord(coords_ * c, ambient_dim_);
}

Subalgebra Subalgebra::conjugated(const Matrix& u) const {
  require_ambient(u, ambient_dim_, "conjugated");
  std::vector<Matrix> basis;
  basis.reserve(basis_.size());
  for (const auto& b : basis_) basis.push_back(u * b * u.adjoint());
  return Subalgebra(ambient_dim_, std::move(basis));
}

AlgebraCheck Subalgebra::check_invariants() const {
  AlgebraCheck out;
  const Matrix gram = coords_.adjoint() * coords_;
  out.gram = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  out.unital = contains(Matrix::Identity(ambient_dim_, ambient_dim_)).residual;
  for (const auto& b : basis_)
    out.adjoint_closure = std::max(out.adjoint_closure, contains(b.adjoint().eval()).residual);
  for (const auto& a : basis_)
    for (const auto& b : basis_)
      out.product_closure = std::max(out.product_closure, contains((a * b).eval()).residual);
  return out;
}

void Subalgebra::save(std::ostream& os) const {
  os << ambient_dim_ << ' ' << dim() << '\n';
  for (const auto& b : basis_) write_matrix(os, b);
}

void Subalgebra::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::invalid_input, "Subalgebra::save: cannot open " + path);
  save(os);
}

Subalgebra Subalgebra::load(std::istream& is, const ToleranceProfile& tol) {
  int n = 0, count = 0;
  if (!(is >> n >> count) || n <= 0 || count <= 0)
    fail(ErrorKind::invalid_input, "Subalgebra::load: bad header");
  std::vector<Matrix> basis;
  basis.reserve(count);
  for (int k = 0; k < count; ++k) {
    Matrix b = read_matrix(is);
    require_ambient(b, n, "Subalgebra::load");
    basis.push_back(std::move(b));
  }
  // accept any spanning set: orthonormalize, then insist it is an algebra
  Subalgebra a = span_of(n, basis, tol);
  if (a.dim() != count)
    fail(ErrorKind::invalid_input, "Subalgebra::load: basis is rank deficient");
  const AlgebraCheck check = a.check_invariants();
  if (!check.ok(tol)) {
    std::ostringstream msg;
    msg << "Subalgebra::load: span is not a unital *-algebra (worst residual " << check.max()
        << ")";
    fail(ErrorKind::invalid_input, msg.str());
  }
  return a;
}

Subalgebra Subalgebra::load(const std::string& path, const ToleranceProfile& tol) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::invalid_input, "Subalgebra::load: cannot open " + path);
  return load(is, tol);
}

Subalgebra generate_algebra(int n, const std::vector<Matrix>& generators,
                            const ToleranceProfile& tol) {
  if (n <= 0) fail(ErrorKind::invalid_input, "generate_algebra: dimension must be positive");
  for (const auto& g : generators) require_ambient(g, n, "generate_algebra");

  std::vector<Matrix> seed = {Matrix::Identity(n, n)};
  seed.insert(seed.end(), generators.begin(), generators.end());
  Matrix coords = pivoted_extension(Matrix(static_cast<Eigen::Index>(n) * n, 0),
                                    matrices_to_columns(seed, n), tol.rank_eps);
  std::vector<Matrix> basis = columns_to_matrices(coords, n);

  // Iterate {orthonormalize; append pairwise products and adjoints}.  After
  // the first full pass only products touching new elements can leave the
  // span, so later passes enumerate those alone.
  int fresh_from = 0;
  const int max_passes = n * n + 2;
  for (int pass = 0; pass < max_passes; ++pass) {
    const int dim = static_cast<int>(basis.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (i >= fresh_from || j >= fresh_from) pairs.emplace_back(i, j);

    std::vector<Matrix> candidates = kernels::pairwise_products(basis, pairs);
    for (int i = fresh_from; i < dim; ++i) candidates.push_back(basis[i].adjoint());

    const Matrix added =
        pivoted_extension(coords, matrices_to_columns(candidates, n), tol.rank_eps);
    if (added.cols() == 0) break;

    fresh_from = dim;
    Matrix next(coords.rows(), coords.cols() + added.cols());
    next << coords, added;
    coords = std::move(next);
    for (Eigen::Index j = 0; j < added.cols(); ++j)
      basis.push_back(from_coord(added.col(j), n));
  }
  return Subalgebra::from_orthonormal_basis(n, std::move(basis), tol);
}

Subalgebra relative_commutant(const Subalgebra& A, const Subalgebra& L,
                              const ToleranceProfile& tol) {
  if (A.ambient_dim() != L.ambient_dim())
    fail(ErrorKind::invalid_input, "relative_commutant: ambient dimensions differ");
  for (const auto& a : A.basis()) {
    const auto r = L.contains(a, tol);
    if (!r.member) {
      std::ostringstream msg;
      msg << "relative_commutant: A is not contained in L (residual " << r.residual << ")";
      fail(ErrorKind::inclusion, msg.str());
    }
  }

  const int n = L.ambient_dim();
  const int dim = L.dim();
  // stacked commutator maps x -> [x, a] on span(L), one block row per basis
  // element of A; the null space needs singular values resolved well below
  // rank_eps, so work on the stacked matrix, not its Gram matrix
  Matrix stacked(static_cast<Eigen::Index>(A.dim()) * n * n, dim);
  for (int i = 0; i < A.dim(); ++i) {
    const Matrix& a = A.basis()[i];
    for (int j = 0; j < dim; ++j) {
      const Matrix& l = L.basis()[j];
      stacked.block(static_cast<Eigen::Index>(i) * n * n, j, static_cast<Eigen::Index>(n) * n,
                    1) = to_coord(l * a - a * l);
    }
  }

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = tol.rank_eps * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);

  std::vector<Matrix> basis;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cut) basis.push_back(L.from_coefficients(svd.matrixV().col(k)));
  }
  if (basis.empty())
    fail(ErrorKind::pipeline_inconsistency,
         "relative_commutant: empty null space (the unit always commutes)");
  return Subalgebra::from_orthonormal_basis(n, std::move(basis), tol);
}

Matrix sample_unitary(const Subalgebra& A, std::uint64_t rng_seed, double spread,
                      const ToleranceProfile& tol) {
  if (!(spread > 0.0)) fail(ErrorKind::invalid_input, "sample_unitary: spread must be positive");
  Rng rng(rng_seed);
  Vector c(A.dim());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = spread * rng.complex_gaussian();
  const Matrix g = A.from_coefficients(c);
  // the span is *-closed, so the Hermitian part stays inside; project to
  // clean up rounding
  const Matrix h = hermitize(A.project(hermitize(g)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::invalid_input, "sample_unitary: eigendecomposition failed");
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(Complex(0.0, es.eigenvalues()(k)));
  (void)tol;
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix haar_unitary(const Subalgebra& A, Rng& rng, const ToleranceProfile& tol) {
  // polar part of a Gaussian element of the span; left-invariance of the
  // Gaussian under the unitary group of A makes the law Haar
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector c(A.dim());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.complex_gaussian();
    const Matrix g = A.from_coefficients(c);
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(svd.singularValues().size() - 1) > tol.rank_eps)
      return svd.matrixU() * svd.matrixV().adjoint();
  }
  fail(ErrorKind::rank_deficiency, "haar_unitary: persistent singular draws");
}

Subalgebra amplify_2x2(const Subalgebra& L) {
  const int n = L.ambient_dim();
  std::vector<Matrix> basis;
  basis.reserve(4 * static_cast<std::size_t>(L.dim()));
  const double scale = std::sqrt(2.0);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      for (const auto& b : L.basis()) {
        Matrix big = Matrix::Zero(2 * n, 2 * n);
        big.block(r * n, s * n, n, n) = scale * b;
        basis.push_back(std::move(big));
      }
  return Subalgebra::from_orthonormal_basis(2 * n, std::move(basis));
}

}  // namespace vnpert
