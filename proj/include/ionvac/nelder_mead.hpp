#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ionvac/types.hpp"

namespace ionvac {

struct NelderMeadOptions {
    double initial_step = 0.1;
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-7;
    int max_evaluations = 4000;
};

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Downhill simplex minimisation (standard reflection/expansion/contraction/shrink
/// coefficients 1, 2, 1/2, 1/2). Deterministic for a deterministic objective.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& f, const Vector& start, const NelderMeadOptions& opt = {}) {
    const Eigen::Index n = start.size();
    std::vector<Vector> pts(n + 1, start);
    std::vector<double> val(n + 1);
    int evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        return f(x);
    };

    for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += opt.initial_step;
    for (Eigen::Index i = 0; i <= n; ++i) val[i] = eval(pts[i]);

    std::vector<Eigen::Index> order(n + 1);
    bool converged = false;
    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
        {
            std::vector<Vector> p2;
            std::vector<double> v2;
            for (auto i : order) {
                p2.push_back(pts[i]);
                v2.push_back(val[i]);
            }
            pts.swap(p2);
            val.swap(v2);
        }

        double spread = 0.0;
        for (Eigen::Index i = 1; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
        if (std::abs(val[n] - val[0]) <= opt.f_tolerance && spread <= opt.x_tolerance) {
            converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Vector reflected = centroid + (centroid - pts[n]);
        const double fr = eval(reflected);
        if (fr < val[0]) {
            const Vector expanded = centroid + 2.0 * (centroid - pts[n]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[n] = expanded;
                val[n] = fe;
            } else {
                pts[n] = reflected;
                val[n] = fr;
            }
            continue;
        }
        if (fr < val[n - 1]) {
            pts[n] = reflected;
            val[n] = fr;
            continue;
        }

        const bool outside = fr < val[n];
        const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                          : Vector(centroid + 0.5 * (pts[n] - centroid));
        const double fc = eval(contracted);
        if (fc < (outside ? fr : val[n])) {
            pts[n] = contracted;
            val[n] = fc;
            continue;
        }

        for (Eigen::Index i = 1; i <= n; ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            val[i] = eval(pts[i]);
        }
    }

    const auto best = std::min_element(val.begin(), val.end()) - val.begin();
    return NelderMeadResult{pts[best], val[best], evals, converged};
}

}  // namespace ionvac
