#include "tightknot/nnls.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace tightknot {

namespace {

// Solves Q_PP z = -c_P on the passive set; entries outside P are zero.
Eigen::VectorXd passive_solve(const SparseMatrix& q, const Eigen::VectorXd& c,
                              const std::vector<char>& passive, double shift) {
  const Eigen::Index m = c.size();
  std::vector<Eigen::Index> slot(m, -1);
  std::vector<Eigen::Index> members;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (passive[k]) {
      slot[k] = static_cast<Eigen::Index>(members.size());
      members.push_back(k);
    }
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  if (members.empty()) return z;

  const auto p = static_cast<Eigen::Index>(members.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    const Eigen::Index k = members[a];
    rhs[a] = -c[k];
    triplets.emplace_back(a, a, shift);
    for (SparseMatrix::InnerIterator it(q, k); it; ++it) {
      const Eigen::Index b = slot[it.row()];
      if (b >= 0) triplets.emplace_back(b, a, it.value());
    }
  }
  SparseMatrix sub(p, p);
  sub.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(sub);
  const Eigen::VectorXd y = ldlt.solve(rhs);
  for (Eigen::Index a = 0; a < p; ++a) z[members[a]] = y[a];
  return z;
}

}  // namespace

NnlsResult solve_gram_nnls(const SparseMatrix& q, const Eigen::VectorXd& c,
                           const std::vector<char>& warm, double regularization,
                           int max_iterations) {
  const Eigen::Index m = c.size();
  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(m);
  if (m == 0) return out;
  if (max_iterations < 0) max_iterations = static_cast<int>(3 * m + 20);

  double diag = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) diag = std::max(diag, q.coeff(k, k));
  const double shift = regularization * std::max(diag, 1.0);
  const double tol = 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff());

  std::vector<char> passive(m, 0);
  Eigen::VectorXd& x = out.x;

  // Warm start: shrink the guessed set until its unconstrained solution is
  // strictly positive, which gives a feasible starting point.
  if (static_cast<Eigen::Index>(warm.size()) == m) {
    passive = warm;
    for (int pass = 0; pass < 8; ++pass) {
      const Eigen::VectorXd z = passive_solve(q, c, passive, shift);
      bool positive = true;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (passive[k] && z[k] <= 0.0) {
          passive[k] = 0;
          positive = false;
        }
      }
      if (positive) {
        x = z;
        break;
      }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (x[k] <= 0.0) {
        x[k] = 0.0;
        passive[k] = 0;
      }
    }
  }

  // Indices whose entry came straight back non-positive; retried only after
  // x has moved, otherwise the outer loop would cycle on them.
  std::vector<char> blocked(m, 0);
  while (out.iterations < max_iterations) {
    ++out.iterations;
    const Eigen::VectorXd w = -(c + q * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (!passive[k] && !blocked[k] && w[k] > best_w) {
        best_w = w[k];
        best = k;
      }
    }
    if (best < 0) return out;
    passive[best] = 1;

    for (int inner = 0; inner <= m; ++inner) {
      const Eigen::VectorXd z = passive_solve(q, c, passive, shift);
      if (inner == 0 && z[best] <= 0.0) {
        passive[best] = 0;
        blocked[best] = 1;
        break;
      }
      std::fill(blocked.begin(), blocked.end(), 0);
      double alpha = 1.0;
      bool clipped = false;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (passive[k] && z[k] <= 0.0) {
          const double a = x[k] / (x[k] - z[k]);
          if (a < alpha) alpha = a;
          clipped = true;
        }
      }
      if (!clipped) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index k = 0; k < m; ++k) {
        if (passive[k] && x[k] <= tol * 1e-3) {
          passive[k] = 0;
          x[k] = 0.0;
        }
      }
    }
  }
  out.converged = false;
  return out;
}

}  // namespace tightknot
