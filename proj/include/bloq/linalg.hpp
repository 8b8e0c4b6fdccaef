#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "bloq/errors.hpp"

namespace bloq {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Structural tolerance shared by the invariant checks (Hermiticity, trace,
/// positivity, norms).
inline constexpr double kTolerance = 1e-10;

enum class Axis { X, Y, Z };

inline constexpr Axis kAxes[] = {Axis::X, Axis::Y, Axis::Z};

inline std::string_view to_string(Axis a) {
    switch (a) {
        case Axis::X: return "X";
        case Axis::Y: return "Y";
        case Axis::Z: return "Z";
    }
    return "?";
}

/// Number of qubits for a power-of-two dimension, or -1 if `dim` is not one.
inline int qubits_for_dim(std::size_t dim) {
    if (dim < 2 || !std::has_single_bit(dim)) return -1;
    return std::countr_zero(dim);
}

/// Square complex matrix whose dimension is 2^n with n >= 1.
class ComplexMatrix {
public:
    explicit ComplexMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw DimensionError("matrix is not square");
        if (qubits_for_dim(static_cast<std::size_t>(m_.rows())) < 0)
            throw DimensionError("matrix dimension " + std::to_string(m_.rows()) +
                                 " is not a power of two >= 2");
    }

    static ComplexMatrix identity(std::size_t dim) {
        return ComplexMatrix(Matrix::Identity(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim)));
    }

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    int num_qubits() const { return qubits_for_dim(dim()); }

    const Matrix& matrix() const { return m_; }
    complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    bool is_hermitian(double tol = kTolerance) const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

    ComplexMatrix operator*(const ComplexMatrix& o) const {
        if (dim() != o.dim()) throw DimensionError("dimension mismatch in product");
        return ComplexMatrix(m_ * o.m_);
    }

    ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }

private:
    Matrix m_;
};

inline ComplexMatrix pauli(Axis axis) {
    Matrix m(2, 2);
    const complex i{0.0, 1.0};
    switch (axis) {
        case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::Y: m << 0.0, -i, i, 0.0; break;
        case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return ComplexMatrix(std::move(m));
}

/// Kronecker product a ⊗ b; `a` acts on the more significant qubits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
struct HermitianEigen {
    Eigen::VectorXd values;
    Matrix vectors;
};

inline HermitianEigen hermitian_eigen(const Matrix& m) {
    // Symmetrize so rounding-level asymmetry does not leak into the solver.
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error("Hermitian eigendecomposition did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Principal square root of a positive semidefinite matrix. Slightly negative
/// eigenvalues (sampled or rounded input) are clamped to zero.
inline Matrix psd_sqrt(const Matrix& m) {
    const auto eig = hermitian_eigen(m);
    Eigen::VectorXd roots(eig.values.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const double v = eig.values(i);
        roots(i) = v < 0.0 ? 0.0 : std::sqrt(v);
    }
    return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace bloq
