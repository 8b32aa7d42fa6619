#include "wgkit/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseLU>
#ifdef WGKIT_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

namespace wgkit {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
#ifdef WGKIT_HAVE_UMFPACK
using LU = Eigen::UmfPackLU<SpMat>;
#else
using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;
#endif

SpMat shifted_matrix(const SpMat& a, double shift) {
    SpMat id(a.rows(), a.cols());
    id.setIdentity();
    SpMat s = a - shift * id;
    s.makeCompressed();
    return s;
}

// Deterministic replacement vector after an Arnoldi breakdown.
Eigen::VectorXd fallback_vector(Eigen::Index n, int seed) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::sin(0.7548776662 * (i + 1) * (seed + 1));
    return v;
}

}  // namespace

EigenPairs shift_invert_eigs(const SpMat& a, const ShiftInvertOptions& opt) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw DomainError("eigensolver: matrix must be square");
    if (opt.count < 1) throw DomainError("eigensolver: count must be >= 1");
    const int count = static_cast<int>(std::min<Eigen::Index>(opt.count, n - 2));
    if (count < 1) throw DomainError("eigensolver: problem too small");

    double shift = opt.shift;
    LU lu;
    SpMat s;  // must outlive lu: UmfPackLU keeps a pointer to it
#ifdef WGKIT_HAVE_UMFPACK
    lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
    lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
#endif
    for (int attempt = 0;; ++attempt) {
        s = shifted_matrix(a, shift);
        {
            // METIS keeps its random state in globals; concurrent orderings
            // interleave it and the factors then depend on the schedule.
            static std::mutex ordering;
            std::lock_guard lock(ordering);
            lu.analyzePattern(s);
        }
        lu.factorize(s);
        if (lu.info() == Eigen::Success) break;
        if (attempt == 2) throw ConvergenceError("eigensolver: shifted matrix is singular");
        shift += 1e-9 * std::max(1.0, std::abs(shift));
    }

    int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * count + 20, 40);
    m = static_cast<int>(std::min<Eigen::Index>(m, n - 1));
    if (m <= count + 1) throw DomainError("eigensolver: Krylov dimension too small");

    Eigen::MatrixXd v(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    v.col(0).setOnes();
    v.col(0) /= std::sqrt(static_cast<double>(n));

    EigenPairs out;
    int k = 0;
    Eigen::VectorXcd theta;
    Eigen::MatrixXcd ritz;
    std::vector<int> order;

    for (int restart = 0;; ++restart) {
        for (int j = k; j < m; ++j) {
            Eigen::VectorXd w = lu.solve(v.col(j));
            ++out.operator_applications;
            auto basis = v.leftCols(j + 1);
            Eigen::VectorXd coef = basis.transpose() * w;
            w.noalias() -= basis * coef;
            Eigen::VectorXd coef2 = basis.transpose() * w;
            w.noalias() -= basis * coef2;
            coef += coef2;
            h.col(j).setZero();
            h.col(j).head(j + 1) = coef;
            double beta = w.norm();
            if (beta <= 1e-13 * std::max(1.0, coef.norm())) {
                w = fallback_vector(n, j);
                for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.transpose() * w);
                beta = 0.0;
                h(j + 1, j) = 0.0;
                v.col(j + 1) = w.normalized();
                continue;
            }
            h(j + 1, j) = beta;
            v.col(j + 1) = w / beta;
        }

        Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(m, m));
        if (es.info() != Eigen::Success)
            throw ConvergenceError("eigensolver: projected eigenproblem failed");
        theta = es.eigenvalues();
        ritz = es.eigenvectors();
        order.resize(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int p, int q) { return std::abs(theta[p]) > std::abs(theta[q]); });

        const Eigen::RowVectorXd last = h.row(m);
        bool converged = true;
        for (int i = 0; i < count; ++i) {
            const int idx = order[i];
            const double res = std::abs(last.cast<std::complex<double>>().dot(ritz.col(idx)));
            if (res > opt.tolerance * std::abs(theta[idx])) {
                converged = false;
                break;
            }
        }
        out.restarts = restart;
        if (converged) break;
        if (restart >= opt.max_restarts)
            throw ConvergenceError("eigensolver: no convergence within the iteration budget");

        // Thick restart on the span of the wanted Ritz vectors.
        int keep = count + (m - count) / 2;
        const auto is_complex = [&](int idx) {
            return std::abs(theta[idx].imag()) > 1e-10 * std::abs(theta[idx]);
        };
        if (is_complex(order[keep - 1]) && keep < m - 1 &&
            std::abs(theta[order[keep]] - std::conj(theta[order[keep - 1]])) <
                1e-8 * std::abs(theta[order[keep - 1]]))
            ++keep;
        Eigen::MatrixXd span(m, keep);
        int cols = 0;
        for (int i = 0; i < keep; ++i) {
            const int idx = order[i];
            if (!is_complex(idx)) {
                span.col(cols++) = ritz.col(idx).real();
            } else if (theta[idx].imag() > 0.0) {
                span.col(cols++) = ritz.col(idx).real();
                if (cols < keep) span.col(cols++) = ritz.col(idx).imag();
            } else {
                span.col(cols++) = ritz.col(idx).imag();
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(span.leftCols(cols));
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, cols);

        const Eigen::MatrixXd vk = v.leftCols(m) * q;
        const Eigen::VectorXd next = v.col(m);
        const Eigen::MatrixXd t = q.transpose() * h.topLeftCorner(m, m) * q;
        const Eigen::RowVectorXd b = h.row(m) * q;
        v.leftCols(cols) = vk;
        v.col(cols) = next;
        h.setZero();
        h.topLeftCorner(cols, cols) = t;
        h.row(cols).head(cols) = b;
        k = cols;
    }

    for (int i = 0; i < count; ++i) {
        const int idx = order[i];
        if (std::abs(theta[idx].imag()) > 1e-8 * std::abs(theta[idx])) continue;
        const double lambda = shift + 1.0 / theta[idx].real();
        Eigen::VectorXd x = v.leftCols(m) * ritz.col(idx).real();
        x.normalize();
        out.values.push_back(lambda);
        out.vectors.conservativeResize(n, out.vectors.cols() + 1);
        out.vectors.col(out.vectors.cols() - 1) = x;
    }
    return out;
}

}  // namespace wgkit
