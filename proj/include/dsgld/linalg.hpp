// linalg.hpp — small dense helpers shared by metrics and network diagnostics.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dsgld/errors.hpp"

namespace dsgld {

inline double max_abs_asymmetry(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

// Symmetric eigendecomposition with eigenvalues clamped at zero. Round-off
// regularly produces tiny negative eigenvalues on empirical covariances; the
// clamp keeps downstream square roots real.
inline void clamped_sym_eig(const Eigen::MatrixXd& m, Eigen::MatrixXd& vectors,
                            Eigen::VectorXd& values) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw MetricError("eigendecomposition failed");
    values = es.eigenvalues().cwiseMax(0.0);
    vectors = es.eigenvectors();
}

// Principal square root of a symmetric PSD matrix (eigenvalues clamped at 0).
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    clamped_sym_eig(m, v, d);
    return v * d.cwiseSqrt().asDiagonal() * v.transpose();
}

// Trace of the principal square root (sum of clamped sqrt-eigenvalues).
inline double trace_psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    clamped_sym_eig(m, v, d);
    return d.cwiseSqrt().sum();
}

// Largest singular value of a (possibly nonsymmetric) matrix, computed as
// sqrt(lambda_max(M^T M)) with the eigenvalue clamped at zero.
inline double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    clamped_sym_eig(m.transpose() * m, v, d);
    return std::sqrt(d.maxCoeff());
}

// Symmetrize and clamp negative eigenvalues; used when publishing covariance
// estimates that must be exactly PSD.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    clamped_sym_eig(m, v, d);
    return v * d.asDiagonal() * v.transpose();
}

} // namespace dsgld
