#pragma once

// Total, classical, and quantum correlations of two-qubit states under the
// generalized relative entropies: I = min over product states of the chosen
// relative entropy, J = max over rank-1 PVMs on B of the same minimum for the
// measured state, D = I - J. Includes the von Neumann discord, closed-form
// evaluators for the pure / Werner / Bell-mixture families, and the Werner
// anomaly scan in the sandwiched-Renyi window alpha in [1/2, 2/3).

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "entropy.hpp"
#include "optimize.hpp"
#include "state.hpp"

namespace qcorr {

// Margin keeping product-state factors full rank: |bloch| <= 1 - delta_bloch.
inline constexpr double delta_bloch = 1e-6;

struct ProductAnsatz {
    Eigen::Vector3d bloch_A = Eigen::Vector3d::Zero();
    Eigen::Vector3d bloch_B = Eigen::Vector3d::Zero();

    CMat sigma_A() const { return bloch_qubit(bloch_A(0), bloch_A(1), bloch_A(2)); }
    CMat sigma_B() const { return bloch_qubit(bloch_B(0), bloch_B(1), bloch_B(2)); }
    CMat product() const { return kron(sigma_A(), sigma_B()); }
};

struct OptimizerConfig {
    int starts = 64;
    int max_iters = 2000;
    double objective_tol = 1e-9;
    double simplex_scale = 0.2;
    std::uint64_t seed = 20240815;
    int measurement_grid = 24;  // points per angle in the PVM scan
};

struct Diagnostics {
    int total_starts_converged = 0;
    int post_starts_converged = 0;
    double raw_quantum = 0.0;      // D before the [-1e-7, 0) clamp
    bool dpi_range_warning = false;
};

struct CorrelationResult {
    double total = 0.0;
    double classical = 0.0;
    double quantum = 0.0;
    ProductAnsatz argmin_total;
    ProjectiveMeasurement argmax_measurement;
    ProductAnsatz argmin_post;
    EntropyKind kind;
    Diagnostics diagnostics;
};

// Optional warm start carried between neighboring points of a parameter sweep.
struct WarmStart {
    ProductAnsatz total;
    ProjectiveMeasurement measurement;
    ProductAnsatz post;
    bool valid = false;
};

inline bool dpi_range_warns(const EntropyKind& k) {
    if (k.alpha_is_inf || k.is_von_neumann()) return false;
    if (k.variety == Variety::Sandwiched) return k.alpha < 0.5;
    return k.alpha > 2.0;
}

inline Eigen::Vector3d bloch_of_qubit(const CMat& m) {
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), m(0, 0).real() - m(1, 1).real()};
}

namespace detail {

// Analytic eigensystem of 1/2 (I + r.sigma): lam_pm = (1 +- |r|)/2 with
// robustly chosen eigenvectors; powers never need a matrix eigensolver.
struct QubitFactor {
    double x, y, z, n;

    explicit QubitFactor(const Eigen::Vector3d& r)
        : x(r(0)), y(r(1)), z(r(2)), n(r.norm()) {}

    double lam_p() const { return 0.5 * (1.0 + n); }
    double lam_m() const { return 0.5 * (1.0 - n); }

    std::array<cplx, 4> power(double t) const {  // row-major 2x2 of sigma^t
        const double cp = std::pow(lam_p(), t), cm = std::pow(lam_m(), t);
        if (n < 1e-14) return {cplx(cp), cplx(0.0), cplx(0.0), cplx(cp)};
        const double ci = 0.5 * (cp + cm), cr = 0.5 * (cp - cm) / n;
        return {cplx(ci + cr * z), cplx(cr * x, -cr * y), cplx(cr * x, cr * y), cplx(ci - cr * z)};
    }

    // Eigenvector for lam_p (the other is its orthogonal complement).
    std::array<cplx, 2> vec_p() const {
        if (n < 1e-14) return {cplx(1.0), cplx(0.0)};
        std::array<cplx, 2> v;
        if (z >= 0.0) v = {cplx(n + z, 0.0), cplx(x, y)};
        else v = {cplx(x, -y), cplx(n - z, 0.0)};
        double s = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
        if (s < 1e-300) return {cplx(1.0), cplx(0.0)};
        v[0] /= s; v[1] /= s;
        return v;
    }
};

inline void kron2x2(const std::array<cplx, 4>& a, const std::array<cplx, 4>& b, CMat& out) {
    out.resize(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out(2 * i + k, 2 * j + l) = a[2 * i + j] * b[2 * k + l];
}

// Map an unconstrained 6-vector to an in-bounds ansatz; the quadratic penalty
// keeps the simplex informed about how far outside the ball it wandered.
inline ProductAnsatz decode_ansatz(const Eigen::VectorXd& u, double& penalty) {
    const double rmax = 1.0 - delta_bloch;
    ProductAnsatz a;
    a.bloch_A = u.segment<3>(0);
    a.bloch_B = u.segment<3>(3);
    penalty = 0.0;
    for (Eigen::Vector3d* r : {&a.bloch_A, &a.bloch_B}) {
        double n = r->norm();
        if (n > rmax) {
            penalty += 10.0 * (n - rmax) * (n - rmax);
            *r *= rmax / n;
        }
    }
    return a;
}

inline Eigen::VectorXd encode_ansatz(const ProductAnsatz& a) {
    Eigen::VectorXd u(6);
    u.segment<3>(0) = a.bloch_A;
    u.segment<3>(3) = a.bloch_B;
    return u;
}

// Relative entropy of a fixed rho against the candidate product state, with
// everything that depends only on rho precomputed. Modes: von Neumann (scalar
// closed form in the factor spectra), max (largest eigenvalue of the
// conjugated state), sandwiched and traditional at general alpha.
class ProductObjective {
  public:
    ProductObjective(const DensityMatrix& rho, const EntropyKind& kind) : kind_(kind) {
        alpha_ = kind.alpha;
        if (kind.alpha_is_inf) {
            mode_ = Mode::Max;
        } else if (kind.is_von_neumann()) {
            mode_ = Mode::VonNeumann;
            s_rho_ = von_neumann_entropy(rho);
            m_a_ = bloch_of_qubit(partial_trace(rho, 0).mat);
            m_b_ = bloch_of_qubit(partial_trace(rho, 1).mat);
        } else if (kind.variety == Variety::Sandwiched) {
            mode_ = Mode::Sandwiched;
        } else {
            mode_ = Mode::Traditional;
            Spectrum s = eig_hermitian(rho.mat);
            rho_evals_ = s.eigenvalues;
            rho_evecs_ = s.eigenvectors;
        }
        rho_mat_ = rho.mat;
    }

    double operator()(const Eigen::VectorXd& u) const {
        double penalty = 0.0;
        ProductAnsatz a = decode_ansatz(u, penalty);
        return value(a) + penalty;
    }

    double value(const ProductAnsatz& a) const {
        switch (mode_) {
            case Mode::VonNeumann: return vn_value(a);
            case Mode::Max: return max_value(a);
            case Mode::Sandwiched: return sandwiched_value(a);
            default: return traditional_value(a);
        }
    }

  private:
    enum class Mode { VonNeumann, Max, Sandwiched, Traditional };

    double vn_value(const ProductAnsatz& a) const {
        double v = -s_rho_ - cross_term(a.bloch_A, m_a_) - cross_term(a.bloch_B, m_b_);
        return (kind_.family == Family::Tsallis) ? ln2 * v : v;
    }

    static double cross_term(const Eigen::Vector3d& r, const Eigen::Vector3d& m) {
        double n = r.norm();
        if (n < 1e-14) return -1.0;  // both eigenvalues 1/2
        double proj = r.dot(m) / n;  // r_hat . m
        return 0.5 * (1.0 + proj) * std::log2(0.5 * (1.0 + n)) +
               0.5 * (1.0 - proj) * std::log2(0.5 * (1.0 - n));
    }

    double conjugated_top_eig(const ProductAnsatz& a, double expo, RVec& evals) const {
        QubitFactor fa(a.bloch_A), fb(a.bloch_B);
        CMat k;
        kron2x2(fa.power(expo), fb.power(expo), k);
        CMat m = k * rho_mat_ * k;
        m = 0.5 * (m + m.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
        evals = es.eigenvalues();
        return evals.maxCoeff();
    }

    double max_value(const ProductAnsatz& a) const {
        RVec evals;
        return std::log2(conjugated_top_eig(a, -0.5, evals));
    }

    double sandwiched_value(const ProductAnsatz& a) const {
        const double e = (1.0 - alpha_) / (2.0 * alpha_);
        RVec evals;
        const double top = conjugated_top_eig(a, e, evals);
        // Eigenvalues below the solver's resolution are noise; alpha < 1
        // amplifies them enough to stall the simplex, so cut them.
        const double floor = top * 1e-13;
        std::vector<double> logs;
        for (Eigen::Index i = 0; i < evals.size(); ++i)
            if (evals(i) > floor) logs.push_back(alpha_ * std::log(evals(i)));
        return from_ln_trace(log_sum_exp(logs));
    }

    double traditional_value(const ProductAnsatz& a) const {
        QubitFactor fa(a.bloch_A), fb(a.bloch_B);
        const std::array<cplx, 2> ap = fa.vec_p(), bp = fb.vec_p();
        const std::array<cplx, 2> am = {-std::conj(ap[1]), std::conj(ap[0])};
        const std::array<cplx, 2> bm = {-std::conj(bp[1]), std::conj(bp[0])};
        const std::array<const std::array<cplx, 2>*, 2> av{&ap, &am}, bv{&bp, &bm};
        const std::array<double, 2> ae{fa.lam_p(), fa.lam_m()}, be{fb.lam_p(), fb.lam_m()};
        std::vector<double> logs;
        logs.reserve(16);
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) {
                const double ln_sig = std::log(ae[s]) + std::log(be[t]);
                // w = a_s (x) b_t; accumulate |<rho_i|w>|^2 per rho eigenvector
                std::array<cplx, 4> w;
                for (int i = 0; i < 2; ++i)
                    for (int k = 0; k < 2; ++k) w[2 * i + k] = (*av[s])[i] * (*bv[t])[k];
                for (Eigen::Index i = 0; i < 4; ++i) {
                    if (rho_evals_(i) <= 0.0) continue;
                    cplx ov = 0.0;
                    for (int q = 0; q < 4; ++q) ov += std::conj(rho_evecs_(q, i)) * w[q];
                    double c = std::norm(ov);
                    if (c <= 0.0) continue;
                    logs.push_back(alpha_ * std::log(rho_evals_(i)) + (1.0 - alpha_) * ln_sig +
                                   std::log(c));
                }
            }
        return from_ln_trace(log_sum_exp(logs));
    }

    double from_ln_trace(double ln_q) const {
        if (kind_.family == Family::Renyi) {
            if (!std::isfinite(ln_q)) return std::numeric_limits<double>::infinity();
            return ln_q / (ln2 * (alpha_ - 1.0));
        }
        return std::expm1(ln_q) / (alpha_ - 1.0);
    }

    EntropyKind kind_;
    Mode mode_ = Mode::Sandwiched;
    double alpha_ = 2.0;
    CMat rho_mat_;
    double s_rho_ = 0.0;
    Eigen::Vector3d m_a_ = Eigen::Vector3d::Zero(), m_b_ = Eigen::Vector3d::Zero();
    RVec rho_evals_;
    CMat rho_evecs_;
};

inline Eigen::Vector3d clamp_ball(Eigen::Vector3d r) {
    const double rmax = 1.0 - delta_bloch;
    double n = r.norm();
    if (n > rmax) r *= rmax / n;
    return r;
}

inline std::vector<Eigen::VectorXd> build_starts(const DensityMatrix& rho, int count,
                                                 std::mt19937_64& rng,
                                                 const std::vector<Eigen::VectorXd>& warm) {
    std::vector<Eigen::VectorXd> starts = warm;
    ProductAnsatz marg;
    marg.bloch_A = clamp_ball(bloch_of_qubit(partial_trace(rho, 0).mat));
    marg.bloch_B = clamp_ball(bloch_of_qubit(partial_trace(rho, 1).mat));
    starts.push_back(encode_ansatz(marg));
    starts.push_back(Eigen::VectorXd::Zero(6));  // I/4
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(starts.size()) < count) {
        Eigen::VectorXd u(6);
        for (int half = 0; half < 2; ++half) {
            Eigen::Vector3d dir{gauss(rng), gauss(rng), gauss(rng)};
            dir.normalize();
            double radius = (1.0 - delta_bloch) * std::cbrt(uni(rng));  // uniform in ball
            u.segment<3>(3 * half) = radius * dir;
        }
        starts.push_back(u);
    }
    return starts;
}

struct InnerMin {
    double value = 0.0;
    ProductAnsatz argmin;
    int converged = 0;
};

inline InnerMin minimize_over_products(const DensityMatrix& rho, const EntropyKind& kind,
                                       const OptimizerConfig& cfg, std::mt19937_64& rng,
                                       const std::vector<Eigen::VectorXd>& warm) {
    ProductObjective obj(rho, kind);
    auto starts = build_starts(rho, cfg.starts, rng, warm);
    auto f = [&obj](const Eigen::VectorXd& u) { return obj(u); };
    MultistartResult r =
        multistart_minimize(f, starts, cfg.simplex_scale, cfg.max_iters, cfg.objective_tol);
    InnerMin out;
    double penalty = 0.0;
    out.argmin = decode_ansatz(r.x, penalty);
    out.value = obj.value(out.argmin);  // report the in-bounds value, penalty-free
    out.converged = r.converged_count;
    return out;
}

}  // namespace detail

inline detail::InnerMin total_correlation_full(const DensityMatrix& rho, const EntropyKind& kind,
                                               const OptimizerConfig& cfg,
                                               const WarmStart* warm = nullptr) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::VectorXd> hints;
    if (warm && warm->valid) hints.push_back(detail::encode_ansatz(warm->total));
    detail::InnerMin m = detail::minimize_over_products(rho, kind, cfg, rng, hints);
    if (m.converged < 2)
        throw NoConvergence("total_correlation: fewer than 2 starts converged");
    return m;
}

inline std::pair<double, ProductAnsatz> total_correlation(const DensityMatrix& rho,
                                                          const EntropyKind& kind,
                                                          const OptimizerConfig& cfg,
                                                          const WarmStart* warm = nullptr) {
    detail::InnerMin m = total_correlation_full(rho, kind, cfg, warm);
    return {m.value, m.argmin};
}

inline std::tuple<double, ProjectiveMeasurement, ProductAnsatz, int> classical_correlation_full(
    const DensityMatrix& rho, const EntropyKind& kind, const OptimizerConfig& cfg,
    const WarmStart* warm = nullptr) {
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    // Light inner configuration for the grid scan; the winning measurement is
    // re-solved with the full multistart before being reported.
    OptimizerConfig light = cfg;
    light.starts = 3;
    light.max_iters = std::min(cfg.max_iters, 600);

    std::vector<Eigen::VectorXd> chain;  // warm chain across grid points
    if (warm && warm->valid) chain.push_back(detail::encode_ansatz(warm->post));
    double best = -std::numeric_limits<double>::infinity();
    ProjectiveMeasurement best_m;
    const int g = std::max(2, cfg.measurement_grid);
    std::vector<ProjectiveMeasurement> probes;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            probes.push_back({M_PI * i / (g - 1), 2.0 * M_PI * j / g});
    if (warm && warm->valid) probes.push_back(warm->measurement);

    for (const auto& m : probes) {
        DensityMatrix post = apply_pvm_on_B(rho, m);
        detail::InnerMin im = detail::minimize_over_products(post, kind, light, rng, chain);
        chain.assign(1, detail::encode_ansatz(im.argmin));
        if (im.value > best) {
            best = im.value;
            best_m = m;
        }
    }

    // Local refinement of (theta, phi) around the grid winner.
    auto outer = [&](const Eigen::VectorXd& tp) {
        ProjectiveMeasurement m{tp(0), tp(1)};
        DensityMatrix post = apply_pvm_on_B(rho, m);
        detail::InnerMin im = detail::minimize_over_products(post, kind, light, rng, chain);
        return -im.value;  // maximize
    };
    Eigen::VectorXd tp0(2);
    tp0 << best_m.theta, best_m.phi;
    NelderMeadResult ref = nelder_mead(outer, tp0, 0.5 * M_PI / g, 80, cfg.objective_tol);
    ProjectiveMeasurement refined{ref.x(0), ref.x(1)};

    // Full-strength solve at the refined measurement: final value and argmin.
    DensityMatrix post = apply_pvm_on_B(rho, refined);
    detail::InnerMin fin = detail::minimize_over_products(post, kind, cfg, rng, chain);
    if (fin.converged < 2)
        throw NoConvergence("classical_correlation: fewer than 2 starts converged");
    if (fin.value < best - 1e-12) {  // refinement must not lose to the grid
        post = apply_pvm_on_B(rho, best_m);
        detail::InnerMin grid_fin = detail::minimize_over_products(post, kind, cfg, rng, chain);
        if (grid_fin.value > fin.value) {
            fin = grid_fin;
            refined = best_m;
        }
    }
    return {fin.value, refined, fin.argmin, fin.converged};
}

inline std::tuple<double, ProjectiveMeasurement, ProductAnsatz> classical_correlation(
    const DensityMatrix& rho, const EntropyKind& kind, const OptimizerConfig& cfg,
    const WarmStart* warm = nullptr) {
    auto [v, m, a, conv] = classical_correlation_full(rho, kind, cfg, warm);
    return {v, m, a};
}

inline CorrelationResult assemble_result(double total, double classical, const EntropyKind& kind) {
    CorrelationResult r;
    r.kind = kind;
    r.total = total;
    r.classical = classical;
    r.diagnostics.raw_quantum = total - classical;
    r.quantum = r.diagnostics.raw_quantum;
    if (r.quantum < 0.0 && r.quantum >= -1e-7) r.quantum = 0.0;  // optimizer noise only
    return r;
}

inline CorrelationResult quantum_correlation(const DensityMatrix& rho, const EntropyKind& kind,
                                             const OptimizerConfig& cfg,
                                             const WarmStart* warm = nullptr) {
    detail::InnerMin tot = total_correlation_full(rho, kind, cfg, warm);
    auto [classical, meas, argmin_post, conv_post] =
        classical_correlation_full(rho, kind, cfg, warm);
    CorrelationResult r = assemble_result(tot.value, classical, kind);
    r.argmin_total = tot.argmin;
    r.argmax_measurement = meas;
    r.argmin_post = argmin_post;
    r.diagnostics.total_starts_converged = tot.converged;
    r.diagnostics.post_starts_converged = conv_post;
    r.diagnostics.dpi_range_warning = dpi_range_warns(kind);
    return r;
}

// --- von Neumann discord -----------------------------------------------------

namespace detail {

// J(theta, phi) = S(rho_A) - sum_i p_i S(rho_{A|i}) for the PVM on B.
inline double vn_classical_at(const DensityMatrix& rho, double s_a,
                              const ProjectiveMeasurement& m) {
    const CMat i2 = CMat::Identity(2, 2);
    double acc = 0.0;
    for (int outcome = 0; outcome < 2; ++outcome) {
        CMat p = (outcome == 0) ? m.projector0() : m.projector1();
        CMat k = kron(i2, p);
        CMat sub = k * rho.mat * k;
        double prob = sub.trace().real();
        if (prob < 1e-14) continue;
        DensityMatrix cond = partial_trace(DensityMatrix{sub / prob, {2, 2}}, 0);
        acc += prob * von_neumann_entropy(cond);
    }
    return s_a - acc;
}

}  // namespace detail

inline CorrelationResult von_neumann_discord(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                             const WarmStart* warm = nullptr) {
    DensityMatrix ra = partial_trace(rho, 0), rb = partial_trace(rho, 1);
    const double s_a = von_neumann_entropy(ra);
    const double total = s_a + von_neumann_entropy(rb) - von_neumann_entropy(rho);

    const int g = std::max(2, cfg.measurement_grid);
    double best = -std::numeric_limits<double>::infinity();
    ProjectiveMeasurement best_m;
    std::vector<ProjectiveMeasurement> probes;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            probes.push_back({M_PI * i / (g - 1), 2.0 * M_PI * j / g});
    if (warm && warm->valid) probes.push_back(warm->measurement);
    for (const auto& m : probes) {
        double v = detail::vn_classical_at(rho, s_a, m);
        if (v > best) { best = v; best_m = m; }
    }
    auto outer = [&](const Eigen::VectorXd& tp) {
        return -detail::vn_classical_at(rho, s_a, {tp(0), tp(1)});
    };
    Eigen::VectorXd tp0(2);
    tp0 << best_m.theta, best_m.phi;
    NelderMeadResult ref = nelder_mead(outer, tp0, 0.5 * M_PI / g, 200, cfg.objective_tol);
    double classical = std::max(best, -ref.value);
    ProjectiveMeasurement meas = (-ref.value >= best) ? ProjectiveMeasurement{ref.x(0), ref.x(1)}
                                                      : best_m;

    CorrelationResult r = assemble_result(total, classical, EntropyKind::von_neumann());
    r.argmin_total.bloch_A = bloch_of_qubit(ra.mat);
    r.argmin_total.bloch_B = bloch_of_qubit(rb.mat);
    DensityMatrix post = apply_pvm_on_B(rho, meas);
    r.argmax_measurement = meas;
    r.argmin_post.bloch_A = bloch_of_qubit(partial_trace(post, 0).mat);
    r.argmin_post.bloch_B = bloch_of_qubit(partial_trace(post, 1).mat);
    r.diagnostics.total_starts_converged = 1;  // deterministic closed-form/grid path
    r.diagnostics.post_starts_converged = 1;
    return r;
}

// --- closed forms ------------------------------------------------------------

namespace detail {

// Map the Renyi bit-values (I, J) at order alpha to any same-variety family
// member through the shared trace quantities Q = 2^{(alpha-1) value}.
inline CorrelationResult map_family(double renyi_total, double renyi_classical,
                                    const EntropyKind& kind) {
    double total = renyi_total, classical = renyi_classical;
    if (kind.family == Family::Tsallis) {
        const double a = kind.alpha;
        total = std::expm1(ln2 * (a - 1.0) * renyi_total) / (a - 1.0);
        classical = std::expm1(ln2 * (a - 1.0) * renyi_classical) / (a - 1.0);
    }
    return assemble_result(total, classical, kind);
}

inline CorrelationResult zero_result(const EntropyKind& kind) {
    return assemble_result(0.0, 0.0, kind);
}

}  // namespace detail

// Total correlation of |psi> = sqrt(lambda)|00> + sqrt(1-lambda)|11> under the
// traditional Renyi entropy, alpha in [1/2, 1): the stationary value of
// log2[lambda a^{2(1-alpha)} + (1-lambda)(1-a)^{2(1-alpha)}]/(alpha-1) with
// 1/a = (lambda/(1-lambda))^{1/(1-2alpha)} + 1. The matching classical
// correlation has no closed form: the optimal measurement basis is not the
// Schmidt basis (numerically it is the transverse basis), so only the total is
// available analytically.
inline double pure_traditional_total(double lambda, double alpha) {
    if (lambda < 0.0 || lambda > 1.0)
        throw InvalidState("pure_traditional_total: lambda outside [0,1]");
    if (alpha < 0.5 || alpha >= 1.0)
        throw OutOfClosedFormRange("pure traditional closed form needs alpha in [1/2, 1)");
    if (lambda == 0.0 || lambda == 1.0) return 0.0;
    const double m = std::max(lambda, 1.0 - lambda);
    if (alpha == 0.5) return -2.0 * std::log2(m);
    const double ratio = lambda / (1.0 - lambda);
    const double astar = 1.0 / (std::pow(ratio, 1.0 / (1.0 - 2.0 * alpha)) + 1.0);
    return std::log2(lambda * std::pow(astar, 2.0 * (1.0 - alpha)) +
                     (1.0 - lambda) * std::pow(1.0 - astar, 2.0 * (1.0 - alpha))) /
           (alpha - 1.0);
}

// Closed forms for |psi> = sqrt(lambda)|00> + sqrt(1-lambda)|11>, sandwiched
// orders alpha >= 1/2 (with the boundary branch alpha <= 2/3 for the total)
// plus the min/max special cases. The classical term uses the Schmidt-basis
// measurement, which is optimal for the sandwiched variety. The traditional
// variety is rejected: its optimal measurement is not the Schmidt basis, so
// there is no closed classical term (see pure_traditional_total for its total).
inline CorrelationResult pure_closed_form(double lambda, const EntropyKind& kind) {
    if (lambda < 0.0 || lambda > 1.0) throw InvalidState("pure_closed_form: lambda outside [0,1]");
    if (kind.is_von_neumann()) throw UnsupportedKind("pure_closed_form: no von Neumann closed form");
    if (!kind.alpha_is_inf && kind.variety == Variety::Traditional)
        throw UnsupportedKind(
            "pure_closed_form: traditional classical correlation has no closed form");
    if (lambda == 0.0 || lambda == 1.0) return detail::zero_result(kind);
    const double m = std::max(lambda, 1.0 - lambda);
    const double ratio = lambda / (1.0 - lambda);

    if (kind.alpha_is_inf) {  // max kind
        double total = 3.0 * std::log2(std::cbrt(lambda) + std::cbrt(1.0 - lambda));
        double classical = 2.0 * std::log2(std::sqrt(lambda) + std::sqrt(1.0 - lambda));
        CorrelationResult r = assemble_result(total, classical, kind);
        r.argmin_total.bloch_A(2) = r.argmin_total.bloch_B(2) =
            2.0 * std::cbrt(lambda) / (std::cbrt(lambda) + std::cbrt(1.0 - lambda)) - 1.0;
        return r;
    }

    const double a = kind.alpha;
    if (a < 0.5) throw OutOfClosedFormRange("pure sandwiched closed form needs alpha >= 1/2");
    double total_r, classical_r;
    if (a <= 2.0 / 3.0) {
        total_r = a / (a - 1.0) * std::log2(m);
    } else {
        const double astar = 1.0 / (std::pow(ratio, a / (2.0 - 3.0 * a)) + 1.0);
        const double c = 2.0 * (1.0 - a) / a;
        total_r = a / (a - 1.0) *
                  std::log2(lambda * std::pow(astar, c) +
                            (1.0 - lambda) * std::pow(1.0 - astar, c));
    }
    if (a == 0.5) {
        classical_r = total_r;  // min kind: J = I, so D = 0
    } else {
        const double aj = 1.0 / (std::pow(ratio, a / (1.0 - 2.0 * a)) + 1.0);
        classical_r = std::log2(std::pow(lambda, a) * std::pow(aj, 2.0 * (1.0 - a)) +
                                std::pow(1.0 - lambda, a) * std::pow(1.0 - aj, 2.0 * (1.0 - a))) /
                      (a - 1.0);
    }
    return detail::map_family(total_r, classical_r, kind);
}

// Closed forms for the Werner state. Sandwiched orders need alpha >= 2/3 (the
// anomaly window below that is numeric-only); traditional orders need
// alpha in [1/2, 1); max kind always available.
inline CorrelationResult werner_closed_form(double p, const EntropyKind& kind) {
    if (p < 0.0 || p > 1.0) throw InvalidState("werner_closed_form: p outside [0,1]");
    if (kind.is_von_neumann()) throw UnsupportedKind("werner_closed_form: no von Neumann closed form");
    if (kind.alpha_is_inf)
        return assemble_result(std::log2(1.0 + 3.0 * p), std::log2(1.0 + p), kind);
    const double a = kind.alpha;
    if (kind.variety == Variety::Sandwiched) {
        if (a < 2.0 / 3.0)
            throw OutOfClosedFormRange("werner sandwiched closed form needs alpha >= 2/3");
    } else if (a < 0.5 || a >= 1.0) {
        throw OutOfClosedFormRange("werner traditional closed form needs alpha in [1/2, 1)");
    }
    const double total_r =
        std::log2((std::pow(1.0 + 3.0 * p, a) + 3.0 * std::pow(1.0 - p, a)) / 4.0) / (a - 1.0);
    const double classical_r =
        std::log2((std::pow(1.0 + p, a) + std::pow(1.0 - p, a)) / 2.0) / (a - 1.0);
    return detail::map_family(total_r, classical_r, kind);
}

// Closed forms for p|phi+><phi+| + (1-p)|phi-><phi-|; J is identically 1.
inline CorrelationResult bell_mixture_closed_form(double p, const EntropyKind& kind) {
    if (p < 0.0 || p > 1.0)
        throw InvalidState("bell_mixture_closed_form: p outside [0,1]");
    if (kind.is_von_neumann())
        throw UnsupportedKind("bell_mixture_closed_form: no von Neumann closed form");
    if (kind.variety == Variety::Traditional)
        throw OutOfClosedFormRange("bell mixture closed forms cover the sandwiched variety only");
    if (kind.alpha_is_inf)
        return assemble_result(2.0 + std::log2(std::max(p, 1.0 - p)), 1.0, kind);
    const double a = kind.alpha;
    if (a < 2.0 / 3.0)
        throw OutOfClosedFormRange("bell mixture closed form needs alpha >= 2/3");
    const double total_r =
        2.0 + std::log2(std::pow(p, a) + std::pow(1.0 - p, a)) / (a - 1.0);
    return detail::map_family(total_r, 1.0, kind);
}

// Locate the maximally quantum-correlated Werner state over a p grid, with
// parabolic refinement at interior maxima. Exposes the anomaly: for sandwiched
// Renyi alpha in [1/2, 2/3) the maximum sits strictly inside (0, 1).
inline std::pair<double, double> werner_anomaly_scan(const EntropyKind& kind,
                                                     const std::vector<double>& p_grid,
                                                     const OptimizerConfig& cfg = {}) {
    if (p_grid.size() < 3) throw InvalidState("werner_anomaly_scan: grid too small");
    std::vector<double> d(p_grid.size());
    WarmStart warm;
    OptimizerConfig point_cfg = cfg;
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        CorrelationResult r =
            quantum_correlation(werner(p_grid[i]), kind, point_cfg, warm.valid ? &warm : nullptr);
        d[i] = r.quantum;
        warm.total = r.argmin_total;
        warm.measurement = r.argmax_measurement;
        warm.post = r.argmin_post;
        warm.valid = true;
        point_cfg.starts = std::max(4, cfg.starts / 8);  // warm chain after first point
        point_cfg.measurement_grid = std::max(4, cfg.measurement_grid / 4);
    }
    std::size_t k = 0;
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i] > d[k]) k = i;
    if (k == 0 || k + 1 == d.size()) return {p_grid[k], d[k]};
    const double y0 = d[k - 1], y1 = d[k], y2 = d[k + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double p_star = p_grid[k];
    if (std::abs(denom) > 1e-300)
        p_star += 0.5 * (y0 - y2) / denom * (p_grid[k + 1] - p_grid[k]);
    const double d_star = y1 - 0.125 * (y0 - y2) * (y0 - y2) / (std::abs(denom) > 1e-300 ? denom : 1.0);
    return {p_star, d_star};
}

}  // namespace qcorr
