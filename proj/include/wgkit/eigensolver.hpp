#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "wgkit/materials.hpp"

namespace wgkit {

class ConvergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

struct ShiftInvertOptions {
    int count = 4;          // eigenvalues wanted (closest to the shift)
    double shift = 0.0;
    int krylov_dim = 0;     // 0 = automatic
    int max_restarts = 200;
    double tolerance = 1e-9;  // relative residual of the shift-inverted problem
};

struct EigenPairs {
    std::vector<double> values;  // real parts, ordered by distance to the shift
    Eigen::MatrixXd vectors;     // unit-norm columns
    int restarts = 0;
    int operator_applications = 0;
};

// Eigenvalues of a real non-symmetric sparse matrix nearest to a real shift,
// by thick-restarted Arnoldi on (A - shift I)^{-1}. The start vector is fixed
// (all ones), so results are reproducible run to run. Complex Ritz pairs are
// dropped from the result; the guided modes sought here are real.
EigenPairs shift_invert_eigs(const Eigen::SparseMatrix<double>& a,
                             const ShiftInvertOptions& options);

}  // namespace wgkit
