#pragma once

// Criticality detection for the transverse-field Ising chain: sweep the
// quantum correlation across lambda, differentiate, locate the derivative
// peak, measure its full width at half maximum, and fit log-log scaling laws
// for the peak width and the pseudocritical-point drift across system sizes.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "correlation.hpp"
#include "ising.hpp"

namespace qcorr {

struct SweepMeta {
    EntropyKind kind = EntropyKind::renyi_sandwiched(2.0);
    int n_sites = 0;  // 0 = thermodynamic limit
    std::uint64_t seed = 0;
    double spacing = 0.0;
};

struct SweepCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    SweepMeta meta;
};

struct ScalingSample {
    int n_sites = 0;
    double lambda_c_n = 0.0;
    double delta_n = 0.0;
    double peak_height = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<int> samples_used;
};

enum class ScalingTarget { Fwhm, LambdaC };

// I and J along a grid, computed under a Renyi kind. Tsallis values of the
// same variety/order follow exactly by the monotone trace map, so a single
// sweep serves both families.
struct ComponentSweep {
    std::vector<double> lambdas, total, classical;
    SweepMeta meta;
};

namespace detail {

inline void check_uniform_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw TooFewPoints("sweep grid needs at least 2 points");
    const double h = grid[1] - grid[0];
    if (h <= 0.0) throw InvalidState("sweep grid must be strictly increasing");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-12)
            throw InvalidState("sweep grid spacing must be uniform within 1e-12");
}

inline OptimizerConfig reduced_cfg(const OptimizerConfig& cfg) {
    OptimizerConfig r = cfg;
    r.starts = std::max(4, cfg.starts / 8);
    r.measurement_grid = std::max(6, cfg.measurement_grid / 4);
    return r;
}

// Renyi bit-value -> same-variety Tsallis value at the same order.
inline double renyi_to_tsallis(double renyi_bits, double alpha) {
    return std::expm1(ln2 * (alpha - 1.0) * renyi_bits) / (alpha - 1.0);
}

}  // namespace detail

// Direct sweep under any kind; the von Neumann window stores bit values (the
// Tsallis ln2 normalization is applied by sweep_discord).
inline ComponentSweep sweep_components(const std::vector<double>& grid, const IsingPoint& tmpl,
                                       const EntropyKind& kind, const OptimizerConfig& cfg,
                                       const QuadratureConfig& quad = {}) {
    detail::check_uniform_grid(grid);
    ComponentSweep out;
    out.lambdas = grid;
    out.meta = {kind, tmpl.n_sites, cfg.seed, grid[1] - grid[0]};
    out.total.reserve(grid.size());
    out.classical.reserve(grid.size());
    WarmStart warm;
    OptimizerConfig point_cfg = cfg;
    for (double lam : grid) {
        IsingPoint pt{lam, tmpl.n_sites};
        DensityMatrix rho = nearest_neighbor_state(correlators_for(pt, quad));
        CorrelationResult r = kind.is_von_neumann()
                                  ? von_neumann_discord(rho, point_cfg, warm.valid ? &warm : nullptr)
                                  : quantum_correlation(rho, kind, point_cfg,
                                                        warm.valid ? &warm : nullptr);
        out.total.push_back(r.total);
        out.classical.push_back(r.classical);
        warm = {r.argmin_total, r.argmax_measurement, r.argmin_post, true};
        point_cfg = detail::reduced_cfg(cfg);  // warm chain carries the optimum
    }
    return out;
}

inline SweepCurve sweep_discord(const std::vector<double>& grid, const IsingPoint& tmpl,
                                const EntropyKind& kind, const OptimizerConfig& cfg,
                                const QuadratureConfig& quad = {}) {
    if (grid.empty() || grid.front() <= 0.0 || grid.back() > 3.0)
        throw InvalidState("sweep_discord: lambda grid must lie inside (0, 3]");
    // A plain Tsallis sweep rides the Renyi sweep of the same order: the trace
    // map is monotone, so optima coincide and values map exactly.
    const bool map_tsallis = !kind.is_von_neumann() && !kind.alpha_is_inf &&
                             kind.family == Family::Tsallis;
    EntropyKind run_kind = kind;
    if (map_tsallis) run_kind.family = Family::Renyi;
    ComponentSweep comp = sweep_components(grid, tmpl, run_kind, cfg, quad);
    SweepCurve curve;
    curve.lambdas = comp.lambdas;
    curve.meta = comp.meta;
    curve.meta.kind = kind;
    curve.values.reserve(grid.size());
    const bool vn_tsallis = kind.is_von_neumann() && kind.family == Family::Tsallis;
    for (std::size_t i = 0; i < comp.total.size(); ++i) {
        double total = comp.total[i], classical = comp.classical[i];
        if (map_tsallis) {
            total = detail::renyi_to_tsallis(total, kind.alpha);
            classical = detail::renyi_to_tsallis(classical, kind.alpha);
        } else if (vn_tsallis) {
            total *= ln2;
            classical *= ln2;
        }
        double d = total - classical;
        if (d < 0.0 && d >= -1e-7) d = 0.0;
        curve.values.push_back(d);
    }
    return curve;
}

inline SweepCurve derivative(const SweepCurve& curve) {
    const std::size_t n = curve.values.size();
    if (n < 3) throw TooFewPoints("derivative needs at least 3 points");
    const double h = curve.lambdas[1] - curve.lambdas[0];
    SweepCurve d;
    d.lambdas = curve.lambdas;
    d.meta = curve.meta;
    d.meta.spacing = h;
    d.values.resize(n);
    d.values[0] = (curve.values[1] - curve.values[0]) / h;
    d.values[n - 1] = (curve.values[n - 1] - curve.values[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d.values[i] = (curve.values[i + 1] - curve.values[i - 1]) / (2.0 * h);
    return d;
}

namespace detail {

struct PeakInfo {
    std::size_t index = 0;
    double lambda = 0.0;
    double height = 0.0;
};

// Highest strict interior local maximum, refined by a parabola through the
// peak grid point and its neighbors. Endpoints are never peak candidates.
inline PeakInfo find_peak(const SweepCurve& c) {
    const std::size_t n = c.values.size();
    if (n < 3) throw TooFewPoints("peak location needs at least 3 points");
    bool found = false;
    std::size_t k = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = c.values[i];
        if (v >= c.values[i - 1] && v >= c.values[i + 1] &&
            (v > c.values[i - 1] || v > c.values[i + 1])) {
            if (!found || v > c.values[k]) {
                k = i;
                found = true;
            }
        }
    }
    if (!found) throw NoInteriorPeak("no strict interior local maximum in curve");
    const double y0 = c.values[k - 1], y1 = c.values[k], y2 = c.values[k + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    const double h = c.lambdas[1] - c.lambdas[0];
    PeakInfo p;
    p.index = k;
    if (std::abs(denom) > 1e-300) {
        const double off = 0.5 * (y0 - y2) / denom;
        p.lambda = c.lambdas[k] + off * h;
        p.height = y1 - 0.125 * (y0 - y2) * (y0 - y2) / denom;
    } else {
        p.lambda = c.lambdas[k];
        p.height = y1;
    }
    return p;
}

}  // namespace detail

inline std::pair<double, double> locate_peak(const SweepCurve& curve) {
    detail::PeakInfo p = detail::find_peak(curve);
    return {p.lambda, p.height};
}

// Full width at half maximum: from the peak, scan outward on each flank for
// the first crossing of height/2 (absolute height, no baseline subtraction)
// and interpolate the crossing linearly between the bracketing grid points.
inline double fwhm(const SweepCurve& curve) {
    detail::PeakInfo p = detail::find_peak(curve);
    const double half = 0.5 * p.height;
    const auto& v = curve.values;
    const auto& x = curve.lambdas;

    double left = 0.0, right = 0.0;
    bool left_ok = false, right_ok = false;
    for (std::size_t i = p.index; i-- > 0;) {
        if (v[i] <= half) {
            const double t = (half - v[i]) / (v[i + 1] - v[i]);
            left = x[i] + t * (x[i + 1] - x[i]);
            left_ok = true;
            break;
        }
    }
    for (std::size_t i = p.index + 1; i < v.size(); ++i) {
        if (v[i] <= half) {
            const double t = (v[i - 1] - half) / (v[i - 1] - v[i]);
            right = x[i - 1] + t * (x[i] - x[i - 1]);
            right_ok = true;
            break;
        }
    }
    if (!left_ok || !right_ok)
        throw HalfHeightNotBracketed("half height not crossed on both flanks");
    return right - left;
}

inline ScalingFit fit_scaling(const std::vector<ScalingSample>& samples, ScalingTarget target) {
    std::vector<int> ns;
    for (const auto& s : samples)
        if (std::find(ns.begin(), ns.end(), s.n_sites) == ns.end()) ns.push_back(s.n_sites);
    if (samples.size() < 4 || ns.size() < 4)
        throw TooFewPoints("scaling fit needs at least 4 samples with distinct n");

    std::vector<double> xs, ys;
    for (const auto& s : samples) {
        const double y = (target == ScalingTarget::Fwhm) ? s.delta_n
                                                         : std::abs(s.lambda_c_n - 1.0);
        if (y <= 0.0) throw DegenerateFit("scaling sample with nonpositive target value");
        xs.push_back(std::log2(static_cast<double>(s.n_sites)));
        ys.push_back(std::log2(y));
    }
    const std::size_t m = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = m * sxx - sx * sx;
    if (std::abs(det) < 1e-12) throw DegenerateFit("scaling fit: collinear abscissae");
    ScalingFit fit;
    fit.exponent = (m * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / m;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = fit.exponent * xs[i] + fit.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r_squared = (ss_tot < 1e-300) ? 1.0 : 1.0 - ss_res / ss_tot;
    if (fit.r_squared < 0.5) throw DegenerateFit("scaling fit r^2 below 0.5");
    fit.samples_used = ns;
    return fit;
}

// Per-size pipeline: sweep -> derivative -> peak + width, one sample per n.
inline std::vector<ScalingSample> scaling_samples(const std::vector<int>& n_list,
                                                  const std::vector<double>& grid,
                                                  const EntropyKind& kind,
                                                  const OptimizerConfig& cfg,
                                                  const QuadratureConfig& quad = {}) {
    std::vector<ScalingSample> out;
    for (int n : n_list) {
        SweepCurve curve = sweep_discord(grid, IsingPoint{1.0, n}, kind, cfg, quad);
        SweepCurve der = derivative(curve);
        detail::PeakInfo p = detail::find_peak(der);
        ScalingSample s;
        s.n_sites = n;
        s.lambda_c_n = p.lambda;
        s.peak_height = p.height;
        s.delta_n = fwhm(der);
        out.push_back(s);
    }
    return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw InvalidState("uniform_grid: need hi > lo and >= 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return g;
}

inline std::vector<double> default_scaling_grid() { return uniform_grid(0.8, 1.2, 401); }
inline std::vector<int> default_n_ladder() { return {64, 128, 256, 512, 1024, 2048, 4096}; }

}  // namespace qcorr
