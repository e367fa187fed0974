#pragma once

// Zero-temperature nearest-neighbor reduced density matrix of the 1D
// transverse-field Ising chain H = J sum sigma^x sigma^x + h sum sigma^z with
// periodic boundaries, J = 1, lambda = h/J. Correlators come from the
// free-fermion solution: integrals over phi in [0, pi] in the thermodynamic
// limit, antiperiodic momentum sums phi_p = (2p-1)pi/N for finite chains, and
// an exact-diagonalization oracle for N <= 12.

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "state.hpp"

namespace qcorr {

struct IsingCorrelators {
    double t_xx = 0.0, t_yy = 0.0, t_zz = 0.0, m_z = 0.0;
};

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_refinements = 20;
};

// n_sites == 0 encodes the thermodynamic limit.
struct IsingPoint {
    double lambda = 1.0;
    int n_sites = 0;
    bool infinite() const { return n_sites == 0; }
};

namespace detail {

// Dispersion factor Lambda(phi) = sqrt(sin^2 phi + (lambda - cos phi)^2).
inline double ising_dispersion(double phi, double lambda) {
    const double s = std::sin(phi), d = lambda - std::cos(phi);
    return std::sqrt(s * s + d * d);
}

// Integrand of G(R, lambda); the phi -> 0 limit at lambda = 1 is 0.
inline double g_integrand(double phi, double r, double lambda) {
    if (phi < 1e-8 && std::abs(lambda - 1.0) < 1e-10) return 0.0;
    const double c = std::cos(phi);
    return (std::sin(phi * r) * std::sin(phi) - c * (c - lambda)) /
           ising_dispersion(phi, lambda);
}

// Integrand of M^z(lambda); the phi -> 0 limit at lambda = 1 is 0.
inline double mz_integrand(double phi, double lambda) {
    if (phi < 1e-8 && std::abs(lambda - 1.0) < 1e-10) return 0.0;
    return -(std::cos(phi) - lambda) / ising_dispersion(phi, lambda);
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = gk_wk[7] * f(c), resg = gk_wg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double fv = f(c - h * gk_nodes[i]) + f(c + h * gk_nodes[i]);
        resk += gk_wk[i] * fv;
        if (i % 2 == 1) resg += gk_wg[i / 2] * fv;
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

template <typename F>
inline double adaptive_gk(const F& f, double a, double b, double tol, int depth_left) {
    double val, err;
    gk15(f, a, b, val, err);
    if (err <= tol) return val;
    if (depth_left <= 0)
        throw QuadratureFailure("adaptive quadrature: tolerance unmet after max refinements");
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, 0.5 * tol, depth_left - 1) +
           adaptive_gk(f, mid, b, 0.5 * tol, depth_left - 1);
}

template <typename F>
inline double ising_integral(const F& f, const QuadratureConfig& q) {
    // (1/pi) * integral over [0, pi], adaptively refined to q.abs_tol.
    return adaptive_gk(f, 0.0, M_PI, q.abs_tol * M_PI, q.max_refinements) / M_PI;
}

}  // namespace detail

inline IsingCorrelators correlators_infinite(double lambda, const QuadratureConfig& q = {}) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw InvalidState("correlators_infinite: lambda must be >= 0");
    IsingCorrelators c;
    c.t_xx = detail::ising_integral(
        [lambda](double phi) { return detail::g_integrand(phi, -1.0, lambda); }, q);
    c.t_yy = detail::ising_integral(
        [lambda](double phi) { return detail::g_integrand(phi, 1.0, lambda); }, q);
    c.m_z = detail::ising_integral(
        [lambda](double phi) { return detail::mz_integrand(phi, lambda); }, q);
    c.t_zz = c.m_z * c.m_z - c.t_yy * c.t_xx;
    return c;
}

inline IsingCorrelators correlators_finite(double lambda, int n) {
    if (n < 4 || n % 2 != 0) throw BadSize("correlators_finite: n must be even and >= 4");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw InvalidState("correlators_finite: lambda must be >= 0");
    // (1/pi) integral -> (2/n) sum over antiperiodic momenta (2p-1)pi/n.
    double gxx = 0.0, gyy = 0.0, mz = 0.0;
    for (int p = 1; p <= n / 2; ++p) {
        const double phi = (2.0 * p - 1.0) * M_PI / n;
        gxx += detail::g_integrand(phi, -1.0, lambda);
        gyy += detail::g_integrand(phi, 1.0, lambda);
        mz += detail::mz_integrand(phi, lambda);
    }
    const double w = 2.0 / n;
    IsingCorrelators c;
    c.t_xx = w * gxx;
    c.t_yy = w * gyy;
    c.m_z = w * mz;
    c.t_zz = c.m_z * c.m_z - c.t_yy * c.t_xx;
    return c;
}

inline IsingCorrelators correlators_for(const IsingPoint& pt, const QuadratureConfig& q = {}) {
    return pt.infinite() ? correlators_infinite(pt.lambda, q)
                         : correlators_finite(pt.lambda, pt.n_sites);
}

// Raw X-form assembly: alpha_pm = (1 +- T_zz)/4 on the diagonal with the
// magnetization split +-M_z/2, beta_pm = (T_xx +- T_yy)/4 on the anti-diagonal.
inline CMat x_form_matrix(const IsingCorrelators& c) {
    const double ap = 0.25 * (1.0 + c.t_zz), am = 0.25 * (1.0 - c.t_zz);
    const double bp = 0.25 * (c.t_xx + c.t_yy), bm = 0.25 * (c.t_xx - c.t_yy);
    CMat m = CMat::Zero(4, 4);
    m(0, 0) = ap + 0.5 * c.m_z;
    m(3, 3) = ap - 0.5 * c.m_z;
    m(1, 1) = m(2, 2) = am;
    m(0, 3) = m(3, 0) = bm;
    m(1, 2) = m(2, 1) = bp;
    return m;
}

// X-form two-qubit state built from the correlator quadruple; eigenvalues in
// [-1e-9, 0) are clamped to 0 (and the state renormalized), anything lower
// signals inconsistent correlators.
inline DensityMatrix nearest_neighbor_state(const IsingCorrelators& c) {
    CMat m = x_form_matrix(c);
    Spectrum s = eig_hermitian(m);
    if (s.eigenvalues.minCoeff() < -1e-9)
        throw NotPSD("nearest_neighbor_state: correlators give eigenvalue below -1e-9");
    RVec ev = s.eigenvalues.cwiseMax(0.0);
    ev /= ev.sum();
    CMat fixed = s.eigenvectors * ev.asDiagonal() * s.eigenvectors.adjoint();
    return make_two_qubit(0.5 * (fixed + fixed.adjoint().eval()));
}

// --- exact-diagonalization oracle -------------------------------------------

namespace detail {

// Lowest eigenpairs of the even-fermion-parity (even sigma^z-popcount) sector
// of H = sum sigma^x_i sigma^x_{i+1} + lambda sum sigma^z_i, via Lanczos with
// full reorthogonalization (dense solve for tiny sectors).
struct EdSector {
    int n = 0;
    double lambda = 0.0;
    std::vector<std::uint32_t> basis;   // even-popcount bitstrings
    std::vector<int> index;             // bitstring -> basis position
    std::vector<double> ground1, ground2;
    double e1 = 0.0, e2 = 0.0;

    void build(double lam, int sites) {
        n = sites;
        lambda = lam;
        const std::uint32_t dim_full = 1u << n;
        basis.clear();
        index.assign(dim_full, -1);
        for (std::uint32_t b = 0; b < dim_full; ++b)
            if (__builtin_popcount(b) % 2 == 0) {
                index[b] = static_cast<int>(basis.size());
                basis.push_back(b);
            }
        solve();
    }

    void matvec(const std::vector<double>& x, std::vector<double>& y) const {
        const std::size_t d = basis.size();
        for (std::size_t i = 0; i < d; ++i) {
            const std::uint32_t b = basis[i];
            double diag = 0.0;
            for (int s = 0; s < n; ++s) diag += ((b >> s) & 1u) ? -1.0 : 1.0;
            y[i] = lambda * diag * x[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            const std::uint32_t b = basis[i];
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (int s = 0; s < n; ++s) {
                const int t = (s + 1) % n;
                const std::uint32_t flipped = b ^ ((1u << s) | (1u << t));
                y[index[flipped]] += xi;  // sigma^x sigma^x bond, coefficient J=1
            }
        }
    }

    void solve() {
        const std::size_t d = basis.size();
        if (d <= 256) {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
            std::vector<double> e(d, 0.0), col(d);
            for (std::size_t j = 0; j < d; ++j) {
                e[j] = 1.0;
                matvec(e, col);
                for (std::size_t i = 0; i < d; ++i) h(i, j) = col[i];
                e[j] = 0.0;
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            e1 = es.eigenvalues()(0);
            e2 = es.eigenvalues()(1);
            ground1.assign(d, 0.0);
            ground2.assign(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                ground1[i] = es.eigenvectors()(i, 0);
                ground2[i] = es.eigenvectors()(i, 1);
            }
            return;
        }
        lanczos(d);
    }

    void lanczos(std::size_t d) {
        const int m = static_cast<int>(std::min<std::size_t>(d, 160));
        std::vector<std::vector<double>> v;
        std::vector<double> a, bcoef;
        std::mt19937_64 rng(12345);
        std::normal_distribution<double> g;
        std::vector<double> w(d), cur(d);
        for (auto& x : cur) x = g(rng);
        normalize(cur);
        v.push_back(cur);
        for (int k = 0; k < m; ++k) {
            matvec(v[k], w);
            double ak = dot(w, v[k]);
            a.push_back(ak);
            for (std::size_t i = 0; i < d; ++i)
                w[i] -= ak * v[k][i] + (k ? bcoef[k - 1] * v[k - 1][i] : 0.0);
            for (const auto& prev : v) {  // full reorthogonalization
                double c = dot(w, prev);
                for (std::size_t i = 0; i < d; ++i) w[i] -= c * prev[i];
            }
            double bk = std::sqrt(dot(w, w));
            if (bk < 1e-13 || k + 1 == m) break;
            bcoef.push_back(bk);
            for (auto& x : w) x /= bk;
            v.push_back(w);
        }
        const int steps = static_cast<int>(a.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
        for (int i = 0; i < steps; ++i) {
            tri(i, i) = a[i];
            if (i + 1 < steps) tri(i, i + 1) = tri(i + 1, i) = bcoef[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        e1 = es.eigenvalues()(0);
        e2 = es.eigenvalues()(1);
        ground1.assign(d, 0.0);
        ground2.assign(d, 0.0);
        for (int k = 0; k < steps; ++k)
            for (std::size_t i = 0; i < d; ++i) {
                ground1[i] += es.eigenvectors()(k, 0) * v[k][i];
                ground2[i] += es.eigenvectors()(k, 1) * v[k][i];
            }
        normalize(ground1);
        normalize(ground2);
    }

    static double dot(const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    }
    static void normalize(std::vector<double>& x) {
        double s = std::sqrt(dot(x, x));
        for (auto& q : x) q /= s;
    }

    // Correlators of the bond (site, site+1), averaged over the ground doublet
    // when quasi-degenerate.
    IsingCorrelators measure(int site) const {
        IsingCorrelators c = measure_vec(ground1, site);
        if (e2 - e1 < 1e-10) {
            IsingCorrelators c2 = measure_vec(ground2, site);
            c.t_xx = 0.5 * (c.t_xx + c2.t_xx);
            c.t_yy = 0.5 * (c.t_yy + c2.t_yy);
            c.t_zz = 0.5 * (c.t_zz + c2.t_zz);
            c.m_z = 0.5 * (c.m_z + c2.m_z);
        }
        return c;
    }

    IsingCorrelators measure_vec(const std::vector<double>& psi, int site) const {
        const int s = site, t = (site + 1) % n;
        double mz = 0.0, tzz = 0.0, txx = 0.0, tyy = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const std::uint32_t b = basis[i];
            const double p = psi[i] * psi[i];
            const double zs = ((b >> s) & 1u) ? -1.0 : 1.0;
            const double zt = ((b >> t) & 1u) ? -1.0 : 1.0;
            mz += p * 0.5 * (zs + zt);
            tzz += p * zs * zt;
            const std::uint32_t flipped = b ^ ((1u << s) | (1u << t));
            const double cross = psi[index[flipped]] * psi[i];
            txx += cross;
            tyy += (zs == zt ? -1.0 : 1.0) * cross;
        }
        // Sign convention: M^z -> +1 as lambda -> inf.
        return {txx, tyy, tzz, -mz};
    }
};

}  // namespace detail

inline IsingCorrelators ed_oracle(double lambda, int n, int site = 0) {
    if (n > 12) throw TooLarge("ed_oracle: n must be <= 12");
    if (n < 4 || n % 2 != 0) throw BadSize("ed_oracle: n must be even and >= 4");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw InvalidState("ed_oracle: lambda must be >= 0");
    detail::EdSector sec;
    sec.build(lambda, n);
    return sec.measure(((site % n) + n) % n);
}

}  // namespace qcorr
