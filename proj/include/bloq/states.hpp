#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bloq/linalg.hpp"

namespace bloq {

/// Single-qubit Pauli expectation triple (<X>, <Y>, <Z>).
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator[](Axis a) const {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            case Axis::Z: return z;
        }
        return 0.0;
    }
    double& operator[](Axis a) {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            default: return z;
        }
    }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    /// Returns the vector rescaled onto the unit sphere if its norm exceeds 1.
    BlochVector clamped() const {
        const double r = norm();
        if (r <= 1.0) return *this;
        return {x / r, y / r, z / r};
    }

    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

inline double max_abs_diff(const BlochVector& a, const BlochVector& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

/// Pure state on n qubits. Qubit 0 is the most significant bit of the basis
/// index.
class StateVector {
public:
    /// |0...0> on `n` qubits.
    explicit StateVector(unsigned n) : n_(n), amps_(std::size_t{1} << n, complex{0.0}) {
        amps_[0] = 1.0;
    }

    StateVector(unsigned n, std::vector<complex> amps) : n_(n), amps_(std::move(amps)) {
        if (amps_.size() != (std::size_t{1} << n))
            throw DimensionError("amplitude count does not match 2^n");
        if (std::abs(norm() - 1.0) > kTolerance)
            throw InvalidStateError("state vector is not normalized");
    }

    static StateVector basis(unsigned n, std::size_t index) {
        StateVector s(n);
        s.amps_[0] = 0.0;
        s.amps_.at(index) = 1.0;
        return s;
    }

    unsigned num_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<complex> amplitudes() { return amps_; }
    std::span<const complex> amplitudes() const { return amps_; }
    complex operator[](std::size_t i) const { return amps_[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    /// |<this|other>|^2.
    double overlap(const StateVector& other) const {
        if (other.dim() != dim()) throw DimensionError("state dimension mismatch");
        complex acc{0.0};
        for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
        return std::norm(acc);
    }

    Matrix outer() const {
        Eigen::Map<const Eigen::VectorXcd> v(amps_.data(), static_cast<Eigen::Index>(amps_.size()));
        return v * v.adjoint();
    }

private:
    unsigned n_;
    std::vector<complex> amps_;
};

/// Positive, unit-trace operator on n >= 1 qubits.
class DensityMatrix {
public:
    struct Unchecked {};

    /// Validates Hermiticity, unit trace, and positivity within kTolerance.
    explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(m.matrix(), Unchecked{}) {
        validate();
    }

    /// Skips the eigenvalue check; for simulator-internal states that are valid
    /// by construction.
    DensityMatrix(Matrix m, Unchecked) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() ||
            qubits_for_dim(static_cast<std::size_t>(m_.rows())) < 0)
            throw DimensionError("density matrix dimension must be a power of two >= 2");
    }

    static DensityMatrix from_state(const StateVector& psi) {
        return DensityMatrix(psi.outer(), Unchecked{});
    }

    static DensityMatrix maximally_mixed(unsigned n) {
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
        return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), Unchecked{});
    }

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    unsigned num_qubits() const { return static_cast<unsigned>(qubits_for_dim(dim())); }
    const Matrix& matrix() const { return m_; }
    Matrix& mutable_matrix() { return m_; }
    complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    complex trace() const { return m_.trace(); }

    void validate(double tol = kTolerance) const {
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw InvalidStateError("density matrix is not Hermitian");
        if (std::abs(m_.trace() - complex{1.0}) > tol)
            throw InvalidStateError("density matrix trace is not 1");
        if (hermitian_eigen(m_).values.minCoeff() < -tol)
            throw InvalidStateError("density matrix has a negative eigenvalue");
    }

private:
    Matrix m_;
};

/// Tr(obs · rho); the imaginary residue is discarded.
inline double expectation(const DensityMatrix& rho, const ComplexMatrix& obs) {
    if (rho.dim() != obs.dim()) throw DimensionError("observable dimension does not match state");
    if (!obs.is_hermitian()) throw InvalidStateError("observable is not Hermitian");
    return (obs.matrix() * rho.matrix()).trace().real();
}

inline BlochVector bloch_of(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw DimensionError("bloch_of needs a single-qubit density matrix");
    return {expectation(rho, pauli(Axis::X)), expectation(rho, pauli(Axis::Y)),
            expectation(rho, pauli(Axis::Z))};
}

/// ½(1 + xX + yY + zZ). Vectors longer than 1 + 1e-9 are rejected; callers
/// holding sampled vectors rescale with BlochVector::clamped() first.
inline DensityMatrix density_from_bloch(const BlochVector& b) {
    if (b.norm() > 1.0 + 1e-9) throw InvalidStateError("Bloch vector longer than 1");
    const complex i{0.0, 1.0};
    Matrix m(2, 2);
    m << 0.5 * (1.0 + b.z), 0.5 * (b.x - i * b.y), 0.5 * (b.x + i * b.y), 0.5 * (1.0 - b.z);
    return DensityMatrix(std::move(m), DensityMatrix::Unchecked{});
}

inline double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.matrix().cwiseAbs2().sum();
}

namespace detail {

/// Square root of a PSD matrix with eigenvalues below round-off set to zero.
inline Matrix truncated_sqrt(const Matrix& m) {
    const auto eig = hermitian_eigen(m);
    const double cut = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    Eigen::VectorXd roots(eig.values.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) roots(i) = eig.values(i) > cut ? std::sqrt(eig.values(i)) : 0.0;
    return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

/// ||sqrt(rho) sqrt(sigma)||_1^2 from singular values. Unlike the eigenvalues of
/// sqrt(rho) sigma sqrt(rho), zero singular values are not square-rooted, so
/// rank-deficient inputs keep full precision and the result is symmetric.
inline double fidelity_eigen(const Matrix& rho, const Matrix& sigma) {
    const Matrix x = truncated_sqrt(rho) * truncated_sqrt(sigma);
    const double tr = Eigen::JacobiSVD<Matrix>(x).singularValues().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("fidelity of states with different dimensions");
    auto hermitian = [](const Matrix& m) {
        return (m - m.adjoint()).cwiseAbs().maxCoeff() <= kTolerance;
    };
    if (!hermitian(rho.matrix()) || !hermitian(sigma.matrix()))
        throw InvalidStateError("fidelity input is not Hermitian");
    if (rho.dim() == 2) {
        // Tr(rho sigma) + 2 sqrt(det rho det sigma) is exact for qubits. A
        // determinant at round-off level is a pure state; its square root
        // would otherwise add ~1e-8.
        auto det = [](const Matrix& m) {
            const double d = m.determinant().real();
            return d > 64.0 * std::numeric_limits<double>::epsilon() ? d : 0.0;
        };
        const double overlap = (rho.matrix() * sigma.matrix()).trace().real();
        const double dets = det(rho.matrix()) * det(sigma.matrix());
        return std::clamp(overlap + 2.0 * std::sqrt(dets), 0.0, 1.0);
    }
    return detail::fidelity_eigen(rho.matrix(), sigma.matrix());
}

/// Reduced state of qubit `keep`, tracing out every other qubit.
inline DensityMatrix partial_trace(const DensityMatrix& rho, unsigned keep) {
    const unsigned n = rho.num_qubits();
    if (keep >= n) throw IndexError("partial_trace qubit " + std::to_string(keep) + " out of range");
    const std::size_t bit = std::size_t{1} << (n - 1 - keep);
    const std::size_t dim = rho.dim();
    Matrix out = Matrix::Zero(2, 2);
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const std::size_t i1 = i | bit;
        out(0, 0) += rho(i, i);
        out(0, 1) += rho(i, i1);
        out(1, 0) += rho(i1, i);
        out(1, 1) += rho(i1, i1);
    }
    return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

/// Reduced state of qubit `keep` directly from amplitudes.
inline DensityMatrix partial_trace(const StateVector& psi, unsigned keep) {
    const unsigned n = psi.num_qubits();
    if (keep >= n) throw IndexError("partial_trace qubit " + std::to_string(keep) + " out of range");
    const std::size_t bit = std::size_t{1} << (n - 1 - keep);
    Matrix out = Matrix::Zero(2, 2);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        if (i & bit) continue;
        const complex a0 = psi[i];
        const complex a1 = psi[i | bit];
        out(0, 0) += std::norm(a0);
        out(0, 1) += a0 * std::conj(a1);
        out(1, 0) += a1 * std::conj(a0);
        out(1, 1) += std::norm(a1);
    }
    return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

}  // namespace bloq
