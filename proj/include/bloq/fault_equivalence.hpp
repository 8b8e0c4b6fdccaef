#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bloq/simulator.hpp"

namespace bloq::assertions {

inline constexpr double kSpectrumTolerance = 1e-6;

struct FaultUnitary {
    ComplexMatrix F;
    /// Degenerate spectrum: many unitaries map sigma to rho and F is one of them.
    bool non_unique = false;
    /// Name of the fault-set gate F was taken from, or empty for the
    /// eigenbasis construction.
    std::string gate;
};

namespace detail {

/// Eigenpairs sorted by descending eigenvalue, each vector's phase fixed so
/// its largest-magnitude component is real and positive.
inline HermitianEigen descending_eigen(const Matrix& m) {
    auto e = hermitian_eigen(m);
    const Eigen::Index d = e.values.size();
    HermitianEigen out{Eigen::VectorXd(d), Matrix(d, d)};
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index src = d - 1 - i;
        out.values(i) = e.values(src);
        Eigen::VectorXcd v = e.vectors.col(src);
        Eigen::Index big = 0;
        for (Eigen::Index r = 1; r < d; ++r)
            if (std::abs(v(r)) > std::abs(v(big)) + 1e-12) big = r;
        v *= std::conj(v(big)) / std::abs(v(big));
        out.vectors.col(i) = v;
    }
    return out;
}

}  // namespace detail

/// Finds F with rho = F sigma F^dagger, or nullopt when the spectra differ.
/// The identity and then the single-qubit fault-set gates (X, Y, Z, S, H) are
/// tried first, so a known fault gate is reported whenever it explains the
/// deviation; otherwise F = U_rho U_sigma^dagger from the ordered eigenbases.
inline std::optional<FaultUnitary> infer_fault_unitary(const DensityMatrix& measured, const DensityMatrix& expected) {
    if (measured.dim() != expected.dim()) throw DimensionError("states have different dimensions");
    measured.validate(1e-9);
    expected.validate(1e-9);
    const auto er = detail::descending_eigen(measured.matrix());
    const auto es = detail::descending_eigen(expected.matrix());
    if ((er.values - es.values).cwiseAbs().maxCoeff() > kSpectrumTolerance) return std::nullopt;

    bool degenerate = false;
    for (Eigen::Index i = 0; i + 1 < es.values.size(); ++i)
        if (es.values(i) - es.values(i + 1) < kSpectrumTolerance) degenerate = true;

    const Matrix& rho = measured.matrix();
    const Matrix& sigma = expected.matrix();
    if ((sigma - rho).cwiseAbs().maxCoeff() < kSpectrumTolerance)
        return FaultUnitary{ComplexMatrix::identity(measured.dim()), degenerate, "id"};
    if (measured.dim() == 2) {
        for (GateKind k : {GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::H}) {
            const Matrix g = to_matrix(target_matrix(Gate::single(k, 0)));
            if ((g * sigma * g.adjoint() - rho).cwiseAbs().maxCoeff() < kSpectrumTolerance)
                return FaultUnitary{ComplexMatrix(g), degenerate, std::string(to_string(k))};
        }
    }
    return FaultUnitary{ComplexMatrix(er.vectors * es.vectors.adjoint()), degenerate, {}};
}

/// max |a_ij - e^{i phi} b_ij| minimized over the global phase phi.
inline double distance_up_to_phase(const Matrix& a, const Matrix& b) {
    const complex ip = (b.adjoint() * a).trace();
    const complex phase = std::abs(ip) > 0 ? ip / std::abs(ip) : complex{1.0};
    return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace bloq::assertions
