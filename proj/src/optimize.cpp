#include "lifetail/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double fd_step(double xi, double rel_step) { return rel_step * std::max(std::abs(xi), 1.0); }
} // namespace

SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> start,
                               std::span<const double> step,
                               const SimplexOptions& options) {
    const std::size_t dim = start.size();
    if (dim == 0 || step.size() != dim) {
        throw std::invalid_argument("minimize_simplex: dimension mismatch");
    }

    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(std::span<const double>(x));
        return std::isnan(v) ? kInf : v;
    };

    // Vertices: start plus one offset per coordinate.
    std::vector<std::vector<double>> verts(dim + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += step[i];
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(verts[i]);
    if (!std::isfinite(fv[0])) {
        throw std::invalid_argument("minimize_simplex: start point is infeasible");
    }

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
    std::vector<std::size_t> order(dim + 1);

    auto sort_order = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    auto diameter = [&]() {
        double d = 0.0;
        const auto& best = verts[order[0]];
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                d = std::max(d, std::abs(verts[order[i]][j] - best[j]));
            }
        }
        return d;
    };

    SimplexResult result;
    while (true) {
        sort_order();
        const std::size_t best = order[0], worst = order[dim];
        const double fspread = fv[worst] - fv[best];
        if (diameter() < options.diameter_tol &&
            (std::isfinite(fspread) ? fspread : kInf) < options.f_tol) {
            result.converged = true;
            break;
        }
        if (evals >= options.max_evals) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += verts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j) p[j] = centroid[j] + t * (centroid[j] - verts[worst][j]);
            return p;
        };

        const auto reflected = along(alpha);
        const double fr = eval(reflected);
        if (fr < fv[best]) {
            const auto expanded = along(gamma);
            const double fe = eval(expanded);
            if (fe < fr) {
                verts[worst] = expanded;
                fv[worst] = fe;
            } else {
                verts[worst] = reflected;
                fv[worst] = fr;
            }
        } else if (fr < fv[order[dim - 1]]) {
            verts[worst] = reflected;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto contracted = along(outside ? rho : -rho);
            const double fc = eval(contracted);
            if (fc < std::min(fr, fv[worst])) {
                verts[worst] = contracted;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < dim; ++j) {
                        verts[i][j] = verts[best][j] + shrink * (verts[i][j] - verts[best][j]);
                    }
                    fv[i] = eval(verts[i]);
                }
            }
        }
    }

    sort_order();
    result.x = verts[order[0]];
    result.f = fv[order[0]];
    result.evals = evals;
    return result;
}

std::vector<double> hessian_fd(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> x, double rel_step) {
    const std::size_t dim = x.size();
    std::vector<double> h(dim);
    for (std::size_t i = 0; i < dim; ++i) h[i] = fd_step(x[i], rel_step);

    std::vector<double> point(x.begin(), x.end());
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        point.assign(x.begin(), x.end());
        point[i] += di;
        point[j] += dj; // callers pass dj = 0 when i == j
        return f(std::span<const double>(point));
    };

    const double f0 = f(x);
    std::vector<double> hess(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        const double fp = at(i, h[i], i, 0.0);
        const double fm = at(i, -h[i], i, 0.0);
        hess[i * dim + i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double fpp = at(i, h[i], j, h[j]);
            const double fpm = at(i, h[i], j, -h[j]);
            const double fmp = at(i, -h[i], j, h[j]);
            const double fmm = at(i, -h[i], j, -h[j]);
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[i * dim + j] = v;
            hess[j * dim + i] = v;
        }
    }
    return hess;
}

std::vector<double> gradient_fd(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, double rel_step) {
    const std::size_t dim = x.size();
    std::vector<double> grad(dim);
    std::vector<double> point(x.begin(), x.end());
    for (std::size_t i = 0; i < dim; ++i) {
        const double h = fd_step(x[i], rel_step);
        point[i] = x[i] + h;
        const double fp = f(std::span<const double>(point));
        point[i] = x[i] - h;
        const double fm = f(std::span<const double>(point));
        point[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

} // namespace lifetail
