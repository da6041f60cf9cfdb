#pragma once

// Shared fixtures for the unit and acceptance suites: seeded random bundles
// with controlled spectral structure.

#include <random>

#include "ahe/lie.hpp"
#include "ahe/monodromy.hpp"

namespace ahe::testing {

// Synthetic free abelian group with commutator relators.
inline std::vector<Word> abelian_relators(int gens) { return commutator_relators(gens); }

struct CommutingScenario {
  Monodromy bundle;
  VectorXd weights;
};

// Random commuting bundle: shared unitary conjugation of block-diagonal
// Jordan-type generators with a common block structure.
inline CommutingScenario random_commuting_bundle(std::uint64_t seed, int max_rank = 4,
                                                 bool allow_jordan = true) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int rank = 1 + static_cast<int>(rng() % max_rank);
  int ngens = 1 + static_cast<int>(rng() % 3);

  // random block partition of rank
  std::vector<int> blocks;
  int left = rank;
  while (left > 0) {
    int b = allow_jordan ? 1 + static_cast<int>(rng() % std::min(left, 3)) : 1;
    blocks.push_back(b);
    left -= b;
  }

  MatrixXcd p = random_unitary(rank, rng);
  std::vector<MatrixXcd> gens;
  for (int g = 0; g < ngens; ++g) {
    MatrixXcd d = MatrixXcd::Zero(rank, rank);
    int off = 0;
    for (int b : blocks) {
      // eigenvalue with a modulus kept away from collisions
      double logmod = std::round(u(rng) * 3.0) * 0.5;
      double arg = u(rng) * 3.0;
      cplx lam = std::polar(std::exp(logmod), arg);
      for (int i = 0; i < b; ++i) {
        d(off + i, off + i) = lam;
        if (i + 1 < b) d(off + i, off + i + 1) = 1.0;  // Jordan coupling
      }
      off += b;
    }
    gens.push_back(p * d * p.adjoint());
  }
  CommutingScenario sc{Monodromy(ngens, abelian_relators(ngens), Field::Complex, std::move(gens)),
                       VectorXd::Zero(ngens)};
  for (int i = 0; i < ngens; ++i) sc.weights(i) = std::round(u(rng) * 4.0) * 0.25 + 1.0;
  return sc;
}

// Random semistable bundle: all Jordan blocks share one modulus per
// generator, so every determinant-character density is equal.
inline CommutingScenario random_semistable_bundle(std::uint64_t seed, int max_rank = 3) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int rank = 1 + static_cast<int>(rng() % max_rank);
  int ngens = 1 + static_cast<int>(rng() % 2);
  std::vector<int> blocks;
  int left = rank;
  while (left > 0) {
    int b = 1 + static_cast<int>(rng() % std::min(left, 2));
    blocks.push_back(b);
    left -= b;
  }
  MatrixXcd p = random_unitary(rank, rng);
  std::vector<MatrixXcd> gens;
  for (int g = 0; g < ngens; ++g) {
    double logmod = std::round(u(rng) * 2.0) * 0.5;  // shared modulus
    MatrixXcd d = MatrixXcd::Zero(rank, rank);
    int off = 0;
    for (int b : blocks) {
      cplx lam = std::polar(std::exp(logmod), u(rng) * 3.0);
      for (int i = 0; i < b; ++i) {
        d(off + i, off + i) = lam;
        if (i + 1 < b) d(off + i, off + i + 1) = 1.0;
      }
      off += b;
    }
    gens.push_back(p * d * p.adjoint());
  }
  CommutingScenario sc{Monodromy(ngens, abelian_relators(ngens), Field::Complex, std::move(gens)),
                       VectorXd::Zero(ngens)};
  for (int i = 0; i < ngens; ++i) sc.weights(i) = 1.0;
  return sc;
}

// Well-conditioned random invertible matrix (for conjugation tests).
inline MatrixXcd random_wellconditioned(int r, std::mt19937_64& rng, double spread = 2.0) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    MatrixXcd m = random_complex_matrix(r, r, rng) + spread * MatrixXcd::Identity(r, r);
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    double cond = svd.singularValues()(0) / svd.singularValues()(r - 1);
    if (cond < 20.0) return m;
  }
  return MatrixXcd::Identity(r, r);
}

// Random flat SL2/GL2 principal bundle over a free group (synthetic mode).
struct PrincipalScenario {
  PrincipalBundle bundle;
  VectorXd weights;
};

inline PrincipalScenario random_principal(std::uint64_t seed, bool real_form = false) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool gl = (rng() % 2) == 0;
  GroupFamily fam = real_form ? (gl ? GroupFamily::GL_R : GroupFamily::SL_R)
                              : (gl ? GroupFamily::GL_C : GroupFamily::SL_C);
  ReductiveGroupSpec spec = ReductiveGroupSpec::make(fam, 2);
  int ngens = 1 + static_cast<int>(rng() % 2);

  auto make_gen = [&]() -> MatrixXcd {
    int kind = static_cast<int>(rng() % 4);
    MatrixXcd g(2, 2);
    double a = 0.25 + 0.5 * std::abs(u(rng));
    switch (kind) {
      case 0: {  // split diagonal
        double t = std::exp(a);
        g << t, 0, 0, 1.0 / t;
        break;
      }
      case 1: {  // unipotent
        g << 1, std::round(u(rng) * 2.0) + 1.0, 0, 1;
        break;
      }
      case 2: {  // rotation (compact direction)
        double th = a;
        g << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        break;
      }
      default: {  // conjugated split element
        double t = std::exp(a);
        MatrixXd c = MatrixXd::Identity(2, 2);
        c(0, 1) = std::round(u(rng) * 2.0);
        MatrixXd d(2, 2);
        d << t, 0, 0, 1.0 / t;
        MatrixXd m = c * d * c.inverse();
        g = m.cast<cplx>();
        break;
      }
    }
    if (gl) {
      // GL: allow a determinant character
      double s = std::exp(0.5 * std::round(u(rng) * 2.0));
      g *= s;
    }
    return g;
  };
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < ngens; ++i) gens.push_back(make_gen());
  PrincipalScenario sc{PrincipalBundle(ngens, {}, spec, std::move(gens)), VectorXd::Zero(ngens)};
  for (int i = 0; i < ngens; ++i) sc.weights(i) = 1.0;
  return sc;
}

}  // namespace ahe::testing
