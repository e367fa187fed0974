#pragma once

// Multistart Nelder-Mead minimization plus a small work-sharing parallel_for.
// Everything here is deterministic for a fixed seed: random starts are drawn
// sequentially up front and the winner is chosen by (value, start index), so
// thread scheduling cannot change results.

#include <Eigen/Dense>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace qcorr {

inline int thread_override_slot(int set = -1) {
    static int value = 0;  // 0 = unset
    if (set >= 0) value = set;
    return value;
}

// --threads on the CLI lands here; QCORR_THREADS wins over it.
inline unsigned thread_count() {
    if (const char* env = std::getenv("QCORR_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    if (int n = thread_override_slot(); n >= 1) return static_cast<unsigned>(n);
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t nt = std::min<std::size_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Standard simplex method (reflect 1, expand 2, contract 1/2, shrink 1/2).
// Converged when the simplex value spread falls below tol.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, double scale, int max_iters,
                                    double tol) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 0; i < n; ++i) xs[i + 1](i) += scale;
    for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    std::vector<int> order(n + 1);
    NelderMeadResult out;
    for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int lo = order[0], hi = order[n], second_hi = order[n - 1];
        if (std::isfinite(fs[hi]) && fs[hi] - fs[lo] < tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != hi) centroid += xs[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + (centroid - xs[hi]);
        double fr = f(xr);
        if (fr < fs[lo]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[hi]);
            double fe = f(xe);
            if (fe < fr) { xs[hi] = xe; fs[hi] = fe; }
            else { xs[hi] = xr; fs[hi] = fr; }
        } else if (fr < fs[second_hi]) {
            xs[hi] = xr;
            fs[hi] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * ((fr < fs[hi] ? xr : xs[hi]) - centroid);
            double fc = f(xc);
            if (fc < std::min(fr, fs[hi])) { xs[hi] = xc; fs[hi] = fc; }
            else {
                for (int i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    xs[i] = xs[lo] + 0.5 * (xs[i] - xs[lo]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    out.x = xs[best];
    out.value = fs[best];
    return out;
}

struct MultistartResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int converged_count = 0;
    double worst_seed_value = -std::numeric_limits<double>::infinity();
};

inline MultistartResult multistart_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::vector<Eigen::VectorXd>& starts, double scale, int max_iters, double tol) {
    if (starts.empty()) throw NoConvergence("multistart: no start points supplied");
    std::vector<NelderMeadResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        results[i] = nelder_mead(f, starts[i], scale, max_iters, tol);
    });
    MultistartResult out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].converged) ++out.converged_count;
        if (results[i].value < results[best].value) best = i;
        out.worst_seed_value = std::max(out.worst_seed_value, results[i].value);
    }
    out.x = results[best].x;
    out.value = results[best].value;
    return out;
}

}  // namespace qcorr
