#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ahe {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Centralized tolerances. These are contract values: changing one changes
// what the library accepts or certifies.
namespace tol {
inline constexpr double special_det = 1e-12;       // |det A - 1| for deck transformations
inline constexpr double manifold_relation = 1e-12; // affine relator words
inline constexpr double monodromy_relation = 1e-10;
inline constexpr double group_membership = 1e-10;  // orthogonality / symplectic / det conditions
inline constexpr double invariance = 1e-9;         // ||(I-P) rho P|| for flat subbundles
inline constexpr double metric_twist = 1e-8;       // equivariance of bundle metrics
inline constexpr double field_equivariance = 1e-10;
inline constexpr double spd_floor = 1e-12;         // minimum eigenvalue for positive definiteness
inline constexpr double gauduchon_default = 1e-6;  // sup-norm of dd_bar(omega^{n-1}) at N=64
inline constexpr double flow_residual = 1e-6;
inline constexpr double flow_cond_limit = 1e6;
inline constexpr int flow_max_steps = 20000;
inline constexpr double subspace_match = 1e-8;     // principal angles between subspaces
}  // namespace tol

// Slope comparisons treat values within this band as equal.
inline double slope_tie_tol(double scale) {
  return 1e-9 * std::max(1.0, std::abs(scale));
}

// Error with a stable machine-readable code alongside the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
  throw Error(code, what);
}

// FNV-1a, used for scenario hashes and checkpoint keys.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 14695981039346656037ull) {
  return fnv1a(s.data(), s.size(), seed);
}

// Deterministic RNG. Every randomized routine takes a seed explicitly.
inline std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x9e3779b9u, 0x85ebca6bu};
  return std::mt19937_64(seq);
}

inline MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline MatrixXcd random_complex_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

// Random unitary via QR of a complex Gaussian-ish matrix.
inline MatrixXcd random_unitary(int r, std::mt19937_64& rng) {
  MatrixXcd a = random_complex_matrix(r, r, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(r, r);
  // Fix the phase so the factorization is unique-ish (determinism across platforms).
  MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < r; ++i) {
    cplx d = rmat(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

// Orthonormalize columns; drops numerically dependent ones below `rank_tol`.
inline MatrixXcd orthonormalize(const MatrixXcd& basis, double rank_tol = 1e-10) {
  if (basis.cols() == 0) return basis;
  Eigen::JacobiSVD<MatrixXcd> svd(basis, Eigen::ComputeThinU);
  double smax = svd.singularValues()(0);
  if (smax <= 0) return MatrixXcd(basis.rows(), 0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > rank_tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Sine of the largest principal angle between the column spans (both
// orthonormal). Computed from the residual projection, which stays accurate
// near zero where 1 - s^2 would cancel.
inline double principal_angle_distance(const MatrixXcd& qa, const MatrixXcd& qb) {
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  MatrixXcd resid = qa - qb * (qb.adjoint() * qa);
  Eigen::JacobiSVD<MatrixXcd> svd(resid);
  return svd.singularValues().maxCoeff();
}

// Span of the union of two column families.
inline MatrixXcd join_spans(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  return orthonormalize(stacked);
}

// Intersection of two column spans via the kernel of the stacked system.
inline MatrixXcd intersect_spans(const MatrixXcd& a, const MatrixXcd& b, double rank_tol = 1e-9) {
  if (a.cols() == 0 || b.cols() == 0) return MatrixXcd(a.rows(), 0);
  MatrixXcd m(a.rows(), a.cols() + b.cols());
  m << a, -b;
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullV);
  double smax = svd.singularValues()(0);
  std::vector<int> null_cols;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= rank_tol * std::max(1.0, smax)) null_cols.push_back(i);
  MatrixXcd result(a.rows(), static_cast<int>(null_cols.size()));
  for (std::size_t j = 0; j < null_cols.size(); ++j)
    result.col(static_cast<int>(j)) = a * svd.matrixV().col(null_cols[j]).head(a.cols());
  return orthonormalize(result);
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

}  // namespace ahe
