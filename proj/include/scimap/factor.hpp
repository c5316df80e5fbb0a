#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "scimap/matrix.hpp"
#include "scimap/text.hpp"

namespace scimap {

// Principal-component loadings after varimax rotation. Columns are ordered
// by explained variance (sum of squared loadings), descending.
struct FactorModel {
    int categories = 0;
    int factors = 0;
    std::vector<double> loadings; // categories x factors, row-major
    bool rotated = false;
    std::vector<double> explained_variance;

    double loading(int cat, int f) const {
        return loadings[static_cast<std::size_t>(cat) * static_cast<std::size_t>(factors) + static_cast<std::size_t>(f)];
    }
};

struct FactorAssignment {
    std::vector<int> assignment;
    std::vector<int> tied_categories; // rows whose max |loading| was shared by several factors
};

namespace detail {

// Raw varimax: pairwise column rotations maximizing the summed variance of
// squared loadings. Orthogonal, so per-row communalities are preserved.
inline void varimax_rotate(std::vector<double>& a, int rows, int cols) {
    if (cols < 2) return;
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)];
    };
    const double angle_tol = 1e-10;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double max_angle = 0.0;
        for (int p = 0; p < cols; ++p) {
            for (int q = p + 1; q < cols; ++q) {
                double su = 0, sv = 0, suv = 0, su2v2 = 0;
                for (int i = 0; i < rows; ++i) {
                    double x = at(i, p), y = at(i, q);
                    double u = x * x - y * y;
                    double v = 2.0 * x * y;
                    su += u;
                    sv += v;
                    suv += u * v;
                    su2v2 += u * u - v * v;
                }
                double num = 2.0 * (suv - su * sv / rows);
                double den = su2v2 - (su * su - sv * sv) / rows;
                if (num == 0.0 && den == 0.0) continue;
                double theta = 0.25 * std::atan2(num, den);
                if (std::fabs(theta) <= angle_tol) continue;
                max_angle = std::max(max_angle, std::fabs(theta));
                double c = std::cos(theta), s = std::sin(theta);
                for (int i = 0; i < rows; ++i) {
                    double x = at(i, p), y = at(i, q);
                    at(i, p) = c * x + s * y;
                    at(i, q) = -s * x + c * y;
                }
            }
        }
        if (max_angle <= angle_tol) break;
    }
}

} // namespace detail

// Principal-component extraction on the similarity matrix treated as a
// correlation-like matrix, followed by varimax. Loadings are eigenvectors
// scaled by the square root of their (non-negative part of the) eigenvalue.
inline FactorModel factor_analysis(const SimilarityMatrix& sim, int factors) {
    const int s = sim.size();
    if (factors < 1 || factors > s)
        throw Error("factor count must satisfy 1 <= F <= " + std::to_string(s) + ", got " +
                    std::to_string(factors));
    Eigen::MatrixXd m(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) m(i, j) = sim.at(i, j);
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw Error("factor_analysis: input matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw Error("factor_analysis: eigendecomposition failed");

    // Eigen returns eigenvalues ascending; take the top F in descending order.
    FactorModel model;
    model.categories = s;
    model.factors = factors;
    model.loadings.resize(static_cast<std::size_t>(s) * static_cast<std::size_t>(factors), 0.0);
    for (int f = 0; f < factors; ++f) {
        int col = s - 1 - f;
        double lambda = std::max(es.eigenvalues()(col), 0.0);
        double scale = std::sqrt(lambda);
        for (int i = 0; i < s; ++i)
            model.loadings[static_cast<std::size_t>(i) * static_cast<std::size_t>(factors) + static_cast<std::size_t>(f)] =
                es.eigenvectors()(i, col) * scale;
    }

    detail::varimax_rotate(model.loadings, s, factors);
    model.rotated = true;

    // Deterministic sign convention: the entry of largest magnitude in each
    // column is made positive.
    for (int f = 0; f < factors; ++f) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < s; ++i) {
            double v = std::fabs(model.loading(i, f));
            if (v > best) { best = v; arg = i; }
        }
        if (model.loading(arg, f) < 0.0) {
            for (int i = 0; i < s; ++i)
                model.loadings[static_cast<std::size_t>(i) * static_cast<std::size_t>(factors) + static_cast<std::size_t>(f)] *= -1.0;
        }
    }

    // Order columns by post-rotation explained variance, descending.
    std::vector<double> ss(static_cast<std::size_t>(factors), 0.0);
    for (int f = 0; f < factors; ++f)
        for (int i = 0; i < s; ++i) ss[static_cast<std::size_t>(f)] += model.loading(i, f) * model.loading(i, f);
    std::vector<int> order(static_cast<std::size_t>(factors));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ss[static_cast<std::size_t>(a)] > ss[static_cast<std::size_t>(b)];
    });
    std::vector<double> reordered(model.loadings.size());
    model.explained_variance.resize(static_cast<std::size_t>(factors));
    for (int f = 0; f < factors; ++f) {
        model.explained_variance[static_cast<std::size_t>(f)] = ss[static_cast<std::size_t>(order[static_cast<std::size_t>(f)])];
        for (int i = 0; i < s; ++i)
            reordered[static_cast<std::size_t>(i) * static_cast<std::size_t>(factors) + static_cast<std::size_t>(f)] =
                model.loading(i, order[static_cast<std::size_t>(f)]);
    }
    model.loadings = std::move(reordered);
    return model;
}

// Each category goes to the factor with the largest absolute loading; exact
// ties break toward the lowest factor index and are reported.
inline FactorAssignment assign_factors(const FactorModel& model) {
    FactorAssignment out;
    out.assignment.resize(static_cast<std::size_t>(model.categories), 0);
    for (int i = 0; i < model.categories; ++i) {
        int arg = 0;
        double best = std::fabs(model.loading(i, 0));
        bool tie = false;
        for (int f = 1; f < model.factors; ++f) {
            double v = std::fabs(model.loading(i, f));
            if (v > best) {
                best = v;
                arg = f;
                tie = false;
            } else if (v == best) {
                tie = true;
            }
        }
        out.assignment[static_cast<std::size_t>(i)] = arg;
        if (tie) out.tied_categories.push_back(i);
    }
    return out;
}

} // namespace scimap
