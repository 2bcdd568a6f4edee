#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace tightknot {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct NnlsResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = true;
};

// Lawson-Hanson active set for the Gram-form problem
//   minimise 1/2 x^T Q x + c^T x  subject to x >= 0,
// with Q = G G^T symmetric positive semi-definite. `warm` marks indices
// expected to be positive (from a previous, similar solve); it may be empty.
// A tiny diagonal shift keeps dependent rows solvable.
NnlsResult solve_gram_nnls(const SparseMatrix& q, const Eigen::VectorXd& c,
                           const std::vector<char>& warm = {}, double regularization = 1e-12,
                           int max_iterations = -1);

}  // namespace tightknot
