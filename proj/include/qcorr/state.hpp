#pragma once

// Dense linear algebra on small complex Hermitian matrices and bipartite
// state manipulations: the substrate for every entropy and correlation
// computation downstream.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "errors.hpp"

namespace qcorr {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Numerical rank threshold separating kernel from support (~100x machine
// epsilon on well-conditioned 4x4 problems).
inline constexpr double eps_rank = 1e-12;

inline constexpr double herm_tol = 1e-12;
inline constexpr double trace_tol = 1e-12;
inline constexpr double psd_tol = 1e-12;

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const CMat& m, double tol = herm_tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tol;
}

// A validated d x d density matrix with an ordered list of subsystem
// dimensions (e.g. {2,2} for two qubits).
struct DensityMatrix {
    CMat mat;
    std::vector<Eigen::Index> dims;

    Eigen::Index dim() const { return mat.rows(); }
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
struct Spectrum {
    RVec eigenvalues;   // descending
    CMat eigenvectors;  // orthonormal columns, matching order
};

inline Spectrum eig_hermitian(const CMat& m) {
    if (!is_hermitian(m)) throw NonHermitian("eig_hermitian: matrix is not Hermitian within 1e-12");
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver failed");
    const Eigen::Index n = m.rows();
    Spectrum s;
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // Eigen sorts ascending; flip
        s.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        s.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return s;
}

// Validate and construct a DensityMatrix: Hermitian to 1e-12, unit trace to
// 1e-12, eigenvalues >= -1e-12 (then clamped to 0 by consumers as needed).
inline DensityMatrix make_density_matrix(CMat m, std::vector<Eigen::Index> dims) {
    Eigen::Index prod = 1;
    for (auto d : dims) prod *= d;
    if (prod != m.rows() || m.rows() != m.cols())
        throw InvalidState("density matrix: product of dims does not match matrix dimension");
    if (!is_hermitian(m)) throw InvalidState("density matrix: not Hermitian within 1e-12");
    if (std::abs(m.trace().real() - 1.0) > trace_tol || std::abs(m.trace().imag()) > trace_tol)
        throw InvalidState("density matrix: trace != 1 within 1e-12");
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw InvalidState("density matrix: negative eigenvalue below -1e-12");
    return DensityMatrix{std::move(m), std::move(dims)};
}

inline DensityMatrix make_two_qubit(CMat m) { return make_density_matrix(std::move(m), {2, 2}); }

// U diag(e_i^t) U^dag. Eigenvalues below eps_rank map to 0 for t > 0; for
// t <= 0 any such eigenvalue signals a support/kernel violation upstream.
inline CMat matrix_power(const CMat& m, double t) {
    Spectrum s = eig_hermitian(m);
    const Eigen::Index n = m.rows();
    RVec powered(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double e = s.eigenvalues(i);
        if (e < eps_rank) {
            if (t <= 0.0)
                throw SingularPower("matrix_power: non-positive exponent on eigenvalue below rank threshold");
            powered(i) = 0.0;
        } else {
            powered(i) = std::pow(e, t);
        }
    }
    return s.eigenvectors * powered.asDiagonal() * s.eigenvectors.adjoint();
}

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Trace out everything except subsystem `keep` (0-based) of a bipartite state.
inline DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
    if (rho.dims.size() != 2) throw BadSubsystem("partial_trace: state is not bipartite");
    if (keep != 0 && keep != 1) throw BadSubsystem("partial_trace: subsystem index out of range");
    const Eigen::Index da = rho.dims[0], db = rho.dims[1];
    const Eigen::Index dk = (keep == 0) ? da : db;
    CMat out = CMat::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j) {
            cplx acc = 0.0;
            if (keep == 0) {
                for (Eigen::Index b = 0; b < db; ++b) acc += rho.mat(i * db + b, j * db + b);
            } else {
                for (Eigen::Index a = 0; a < da; ++a) acc += rho.mat(a * db + i, a * db + j);
            }
            out(i, j) = acc;
        }
    return DensityMatrix{std::move(out), {dk}};
}

// Rank-1 projective measurement on a qubit, Bloch-angle parametrized:
// |v> = (cos(theta/2), e^{i phi} sin(theta/2)), P0 = |v><v|, P1 = I - P0.
struct ProjectiveMeasurement {
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // [0, 2 pi)

    CMat projector0() const {
        CVec v(2);
        v(0) = std::cos(theta / 2.0);
        v(1) = std::polar(std::sin(theta / 2.0), phi);
        return v * v.adjoint();
    }
    CMat projector1() const { return CMat::Identity(2, 2) - projector0(); }
};

// rho' = sum_i (I (x) P_i) rho (I (x) P_i): dephase subsystem B in the
// measurement basis. Idempotent and trace-preserving.
inline DensityMatrix apply_pvm_on_B(const DensityMatrix& rho, const ProjectiveMeasurement& m) {
    if (rho.dims.size() != 2 || rho.dims[0] != 2 || rho.dims[1] != 2)
        throw BadSubsystem("apply_pvm_on_B: state is not two-qubit");
    const CMat i2 = CMat::Identity(2, 2);
    const CMat k0 = kron(i2, m.projector0());
    const CMat k1 = kron(i2, m.projector1());
    CMat out = k0 * rho.mat * k0 + k1 * rho.mat * k1;
    out = 0.5 * (out + out.adjoint().eval());  // scrub roundoff asymmetry
    return DensityMatrix{std::move(out), rho.dims};
}

// Uhlmann fidelity F(rho,sigma) = ||sqrt(rho) sqrt(sigma)||_1
//                               = tr sqrt( sqrt(rho) sigma sqrt(rho) ).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
    CMat sr = matrix_power(rho.mat, 0.5);
    CMat inner = sr * sigma.mat * sr;
    inner = 0.5 * (inner + inner.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(inner, Eigen::EigenvaluesOnly);
    double f = 0.0;
    for (Eigen::Index i = 0; i < inner.rows(); ++i)
        f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    return std::min(f, 1.0);
}

// --- randomized inputs -------------------------------------------------------

inline CMat random_gaussian_matrix(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMat m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

// Hilbert-Schmidt ensemble: G G^dag / tr(G G^dag); full rank with prob. 1.
inline DensityMatrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng,
                                           std::vector<Eigen::Index> dims = {}) {
    CMat g = random_gaussian_matrix(dim, rng);
    CMat m = g * g.adjoint();
    m /= m.trace().real();
    m = 0.5 * (m + m.adjoint().eval());
    if (dims.empty()) dims = {dim};
    return make_density_matrix(std::move(m), std::move(dims));
}

inline DensityMatrix random_density_matrix(Eigen::Index dim, std::uint64_t seed,
                                           std::vector<Eigen::Index> dims = {}) {
    std::mt19937_64 rng(seed);
    return random_density_matrix(dim, rng, std::move(dims));
}

// Haar-random unitary via QR of a complex Gaussian with phase correction.
inline CMat random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
    CMat g = random_gaussian_matrix(dim, rng);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < dim; ++i) {
        cplx d = r(i, i);
        q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : cplx(1.0, 0.0);
    }
    return q;
}

// Haar-random two-qubit pure state.
inline DensityMatrix random_pure_state(Eigen::Index dim, std::mt19937_64& rng,
                                       std::vector<Eigen::Index> dims = {}) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
    v.normalize();
    CMat m = v * v.adjoint();
    if (dims.empty()) dims = {dim};
    return DensityMatrix{std::move(m), std::move(dims)};
}

// --- benchmark state families -----------------------------------------------

// |psi> = sqrt(lambda)|00> + sqrt(1-lambda)|11>
inline DensityMatrix pure_schmidt(double lambda) {
    CVec v = CVec::Zero(4);
    v(0) = std::sqrt(lambda);
    v(3) = std::sqrt(1.0 - lambda);
    return DensityMatrix{v * v.adjoint(), {2, 2}};
}

// rho_W = p |psi-><psi-| + (1-p) I/4
inline DensityMatrix werner(double p) {
    CVec v = CVec::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    CMat m = p * (v * v.adjoint()) + (1.0 - p) * CMat::Identity(4, 4) / 4.0;
    return DensityMatrix{std::move(m), {2, 2}};
}

inline CVec bell_phi(int sign) {  // |phi+-> = (|00> +- |11>)/sqrt(2)
    CVec v = CVec::Zero(4);
    v(0) = 1.0 / std::sqrt(2.0);
    v(3) = sign / std::sqrt(2.0);
    return v;
}

// rho_BM = p |phi+><phi+| + (1-p) |phi-><phi-|
inline DensityMatrix bell_mixture(double p) {
    CVec vp = bell_phi(+1), vm = bell_phi(-1);
    CMat m = p * (vp * vp.adjoint()) + (1.0 - p) * (vm * vm.adjoint());
    return DensityMatrix{std::move(m), {2, 2}};
}

// rho_BN = p |phi+><phi+| + (1-p) |00><00|
inline DensityMatrix bell_product_mixture(double p) {
    CVec vp = bell_phi(+1);
    CMat m = p * (vp * vp.adjoint());
    m(0, 0) += 1.0 - p;
    return DensityMatrix{std::move(m), {2, 2}};
}

// 1/2 (I + r . sigma); requires |r| <= 1.
inline CMat bloch_qubit(double rx, double ry, double rz) {
    CMat m(2, 2);
    m(0, 0) = cplx(0.5 * (1.0 + rz), 0.0);
    m(1, 1) = cplx(0.5 * (1.0 - rz), 0.0);
    m(0, 1) = cplx(0.5 * rx, -0.5 * ry);
    m(1, 0) = cplx(0.5 * rx, 0.5 * ry);
    return m;
}

} // namespace qcorr
