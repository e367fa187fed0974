#pragma once

// Relative-entropy functionals on density-matrix pairs: sandwiched and
// traditional Renyi/Tsallis families of order alpha, the von Neumann limit,
// and the min/max/collision/linear special cases. All values are in bits
// (base-2 logarithms); Tsallis values use the unnormalized trace form
// (q - 1)/(alpha - 1), which is what makes the exact Renyi<->Tsallis map
// renyi = log2(1 + (alpha-1) * tsallis)/(alpha-1) hold identically.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "state.hpp"

namespace qcorr {

inline constexpr double ln2 = 0.6931471805599453;

// |alpha - 1| below this routes to the von Neumann formula: the direct
// expressions degrade as 0/0 there.
inline constexpr double alpha_one_window = 1e-6;

enum class Family { Renyi, Tsallis };
enum class Variety { Sandwiched, Traditional };

// A finite real or a +infinity marker. Relative entropies return the marker
// on support violations so callers can treat it as a hard barrier instead of
// mistaking a large float for data.
struct ExtendedReal {
    double value = 0.0;
    bool is_infinite = false;

    static ExtendedReal finite(double v) { return {v, false}; }
    static ExtendedReal infinity() { return {0.0, true}; }

    // Collapse to an IEEE double for optimizer objectives and printing.
    double as_double() const {
        return is_infinite ? std::numeric_limits<double>::infinity() : value;
    }
};

struct EntropyKind {
    Family family = Family::Renyi;
    Variety variety = Variety::Sandwiched;
    double alpha = 2.0;
    bool alpha_is_inf = false;

    static void check_alpha(double a) {
        if (!std::isfinite(a) || a <= 0.0)
            throw InvalidAlpha("alpha must be a positive finite real");
    }
    static EntropyKind renyi_sandwiched(double a) {
        check_alpha(a);
        return {Family::Renyi, Variety::Sandwiched, a, false};
    }
    static EntropyKind renyi_traditional(double a) {
        check_alpha(a);
        return {Family::Renyi, Variety::Traditional, a, false};
    }
    static EntropyKind tsallis_sandwiched(double a) {
        check_alpha(a);
        return {Family::Tsallis, Variety::Sandwiched, a, false};
    }
    static EntropyKind tsallis_traditional(double a) {
        check_alpha(a);
        return {Family::Tsallis, Variety::Traditional, a, false};
    }
    static EntropyKind linear() { return tsallis_sandwiched(2.0); }
    static EntropyKind collision() { return renyi_sandwiched(2.0); }
    static EntropyKind min_entropy() { return renyi_sandwiched(0.5); }
    static EntropyKind max_entropy() { return {Family::Renyi, Variety::Sandwiched, 0.0, true}; }
    static EntropyKind von_neumann() { return {Family::Renyi, Variety::Sandwiched, 1.0, false}; }

    bool is_von_neumann() const { return !alpha_is_inf && std::abs(alpha - 1.0) < alpha_one_window; }
};

inline std::string kind_label(const EntropyKind& k) {
    std::string base = (k.family == Family::Renyi) ? "renyi" : "tsallis";
    base += (k.variety == Variety::Sandwiched) ? "-s" : "-t";
    return base;
}

// CLI-facing kind parser; aliases cover the common named orders.
inline EntropyKind parse_kind(const std::string& name, std::optional<double> alpha) {
    auto need_alpha = [&]() {
        if (!alpha) throw InvalidAlpha("kind '" + name + "' requires --alpha");
        return *alpha;
    };
    if (name == "renyi-s") return EntropyKind::renyi_sandwiched(need_alpha());
    if (name == "renyi-t") return EntropyKind::renyi_traditional(need_alpha());
    if (name == "tsallis-s") return EntropyKind::tsallis_sandwiched(need_alpha());
    if (name == "tsallis-t") return EntropyKind::tsallis_traditional(need_alpha());
    if (name == "min") return EntropyKind::min_entropy();
    if (name == "max") return EntropyKind::max_entropy();
    if (name == "collision") return EntropyKind::collision();
    if (name == "linear") return EntropyKind::linear();
    if (name == "vn") return EntropyKind::von_neumann();
    throw InvalidKind("unknown entropy kind '" + name + "'");
}

inline double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

inline double log_sum_exp(const std::vector<double>& logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double l : logs) m = std::max(m, l);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - m);
    return m + std::log(s);
}

namespace detail {

// sigma's support data: eigenbasis columns restricted to eigenvalues above
// the rank threshold, plus how much of rho leaks into sigma's kernel.
struct SupportView {
    RVec s;        // positive sigma eigenvalues, descending
    CMat basis;    // corresponding eigenvectors (d x r)
    CMat rho_p;    // rho compressed to that basis (r x r)
    double leak;   // tr of rho outside supp(sigma)
};

inline SupportView project_onto_support(const CMat& rho, const CMat& sigma) {
    Spectrum ss = eig_hermitian(sigma);
    Eigen::Index r = 0;
    while (r < ss.eigenvalues.size() && ss.eigenvalues(r) >= eps_rank) ++r;
    SupportView v;
    v.s = ss.eigenvalues.head(r);
    v.basis = ss.eigenvectors.leftCols(r);
    v.rho_p = v.basis.adjoint() * rho * v.basis;
    v.rho_p = 0.5 * (v.rho_p + v.rho_p.adjoint().eval());
    v.leak = rho.trace().real() - v.rho_p.trace().real();
    return v;
}

inline bool support_violated(const SupportView& v) { return v.leak > eps_rank; }

// ln tr[(sigma^e rho sigma^e)^alpha] with e = (1-alpha)/(2 alpha), computed
// in log space so alpha in the hundreds neither overflows nor underflows.
// Returns -inf when the trace is exactly zero (disjoint supports, alpha < 1).
inline double ln_sandwiched_trace(const CMat& rho, const CMat& sigma, double alpha) {
    const double e = (1.0 - alpha) / (2.0 * alpha);
    CMat core;
    if (alpha > 1.0) {  // e < 0: only defined on supp(sigma); caller checked leak
        SupportView v = project_onto_support(rho, sigma);
        RVec w(v.s.size());
        for (Eigen::Index i = 0; i < v.s.size(); ++i) w(i) = std::pow(v.s(i), e);
        core = w.asDiagonal() * v.rho_p * w.asDiagonal();
    } else {  // e > 0: kernel of sigma maps to zero naturally
        CMat se = matrix_power(sigma, e);
        core = se * rho * se;
    }
    core = 0.5 * (core + core.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(core, Eigen::EigenvaluesOnly);
    std::vector<double> logs;
    for (Eigen::Index i = 0; i < core.rows(); ++i) {
        double m = es.eigenvalues()(i);
        if (m > 0.0) logs.push_back(alpha * std::log(m));
    }
    return log_sum_exp(logs);
}

// ln tr(rho^alpha sigma^{1-alpha}) via both eigenbases, same log-space idea.
inline double ln_traditional_trace(const CMat& rho, const CMat& sigma, double alpha) {
    RVec s, r;
    CMat overlap;  // overlap(i,j) = |<rho_i|sigma_j>|^2
    if (alpha > 1.0) {  // restrict to supp(sigma); caller checked leak
        SupportView v = project_onto_support(rho, sigma);
        Spectrum rs = eig_hermitian(v.rho_p);
        s = v.s;
        r = rs.eigenvalues;
        overlap = rs.eigenvectors.adjoint();  // sigma is diagonal in this basis
    } else {
        Spectrum ss = eig_hermitian(sigma);
        Spectrum rs = eig_hermitian(rho);
        s = ss.eigenvalues;
        r = rs.eigenvalues;
        overlap = rs.eigenvectors.adjoint() * ss.eigenvectors;
    }
    std::vector<double> logs;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (r(i) <= 0.0) continue;  // rho^alpha kills its kernel (alpha > 0)
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            if (s(j) < eps_rank) continue;  // sigma kernel contributes 0 (1-alpha > 0 here)
            double c = std::norm(overlap(i, j));
            if (c <= 0.0) continue;
            logs.push_back(alpha * std::log(r(i)) + (1.0 - alpha) * std::log(s(j)) + std::log(c));
        }
    }
    return log_sum_exp(logs);
}

}  // namespace detail

inline double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.mat, Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        double p = es.eigenvalues()(i);
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

inline ExtendedReal von_neumann_relative(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch("von_neumann_relative: dimension mismatch");
    detail::SupportView v = detail::project_onto_support(rho.mat, sigma.mat);
    if (detail::support_violated(v)) return ExtendedReal::infinity();
    // tr(rho log2 sigma) in sigma's eigenbasis, then -S(rho) - that.
    double cross = 0.0;
    for (Eigen::Index j = 0; j < v.s.size(); ++j)
        cross += v.rho_p(j, j).real() * std::log2(v.s(j));
    return ExtendedReal::finite(-von_neumann_entropy(rho) - cross);
}

inline ExtendedReal relative_max_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch("relative_max_entropy: dimension mismatch");
    detail::SupportView v = detail::project_onto_support(rho.mat, sigma.mat);
    if (detail::support_violated(v)) return ExtendedReal::infinity();
    RVec w(v.s.size());
    for (Eigen::Index i = 0; i < v.s.size(); ++i) w(i) = 1.0 / std::sqrt(v.s(i));
    CMat core = w.asDiagonal() * v.rho_p * w.asDiagonal();
    core = 0.5 * (core + core.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(core, Eigen::EigenvaluesOnly);
    return ExtendedReal::finite(std::log2(es.eigenvalues().maxCoeff()));
}

inline ExtendedReal relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const EntropyKind& kind) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch("relative_entropy: dimension mismatch");
    if (kind.alpha_is_inf) {
        if (kind.family != Family::Renyi || kind.variety != Variety::Sandwiched)
            throw InvalidKind("alpha -> infinity limit exists only for sandwiched Renyi");
        return relative_max_entropy(rho, sigma);
    }
    EntropyKind::check_alpha(kind.alpha);
    const double a = kind.alpha;
    if (kind.is_von_neumann()) {
        ExtendedReal vn = von_neumann_relative(rho, sigma);
        if (vn.is_infinite) return vn;
        // The unnormalized Tsallis family limits to ln2 times the bit value.
        return ExtendedReal::finite(kind.family == Family::Tsallis ? ln2 * vn.value : vn.value);
    }
    if (a > 1.0) {  // negative power of sigma: kernel rule applies to both varieties
        detail::SupportView v = detail::project_onto_support(rho.mat, sigma.mat);
        if (detail::support_violated(v)) return ExtendedReal::infinity();
    }
    const double ln_q = (kind.variety == Variety::Sandwiched)
                            ? detail::ln_sandwiched_trace(rho.mat, sigma.mat, a)
                            : detail::ln_traditional_trace(rho.mat, sigma.mat, a);
    if (kind.family == Family::Renyi) {
        if (!std::isfinite(ln_q)) return ExtendedReal::infinity();  // tr = 0, alpha < 1 here
        return ExtendedReal::finite(ln_q / (ln2 * (a - 1.0)));
    }
    return ExtendedReal::finite(std::expm1(ln_q) / (a - 1.0));
}

// Check the alpha -> 1 crossover against each family's own limit: von Neumann
// bits for Renyi, ln2 times that for the unnormalized Tsallis form.
struct ContinuityReport {
    double limit = 0.0;
    double below = 0.0;       // value at alpha = 1 - 1e-4
    double above = 0.0;       // value at alpha = 1 + 1e-4
    double max_deviation = 0.0;
    bool passed = false;
};

inline ContinuityReport alpha_continuity_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                               Family family, Variety variety, double tol = 1e-3) {
    EntropyKind lo{family, variety, 1.0 - 1e-4, false};
    EntropyKind hi{family, variety, 1.0 + 1e-4, false};
    ContinuityReport rep;
    ExtendedReal vn = von_neumann_relative(rho, sigma);
    if (vn.is_infinite) throw InvalidState("alpha_continuity_check requires full-rank sigma");
    rep.limit = (family == Family::Tsallis) ? ln2 * vn.value : vn.value;
    rep.below = relative_entropy(rho, sigma, lo).as_double();
    rep.above = relative_entropy(rho, sigma, hi).as_double();
    rep.max_deviation = std::max(std::abs(rep.below - rep.limit), std::abs(rep.above - rep.limit));
    rep.passed = rep.max_deviation <= tol;
    return rep;
}

}  // namespace qcorr
