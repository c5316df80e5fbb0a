#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "scimap/network.hpp"
#include "scimap/text.hpp"

namespace scimap {

struct Point {
    double x = 0.0, y = 0.0;

    bool operator==(const Point&) const = default;
};

struct LayoutConfig {
    double length_scale = 1.0;        // L: desired length l(i,j) = L * d(i,j)
    double spring_scale = 1.0;        // K: spring constant k(i,j) = K / d(i,j)^2
    double gradient_tolerance = 1e-4; // stop when every node's gradient norm is below this
    std::uint64_t max_node_steps = 100000;
    std::uint64_t seed = 42;
    bool record_stress_trace = false; // debug: stress after every accepted move

    void validate() const {
        if (!(length_scale > 0)) throw Error("length_scale must be > 0");
        if (!(spring_scale > 0)) throw Error("spring_scale must be > 0");
        if (!(gradient_tolerance > 0)) throw Error("gradient_tolerance must be > 0");
    }
};

enum class LayoutTermination {
    GradientTolerance,
    IterationCap,
    Stalled, // every above-tolerance node rejected its line search; should not occur in practice
};

struct Layout {
    std::vector<Point> coords; // rescaled to a unit bounding box centered at the origin
    LayoutConfig config;
    // Stress values are measured in optimizer scale, before the unit-box rescale.
    double final_stress = 0.0;
    double initial_stress = 0.0;
    LayoutTermination termination = LayoutTermination::GradientTolerance;
    std::uint64_t node_steps = 0;
    std::vector<double> stress_trace;
};

namespace detail {

// Pairwise spring parameters derived from graph distances. Target
// distances are floored so identical-profile pairs (d = 0) cannot produce
// infinite spring constants.
struct SpringSystem {
    int n = 0;
    std::vector<double> l; // desired lengths, row-major
    std::vector<double> k; // spring constants, row-major

    static constexpr double kDistanceFloor = 1e-3;

    SpringSystem(const LayoutConfig& cfg, const SquareMatrix& dist) : n(dist.n) {
        l.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        k.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double d = std::max(dist.at(i, j), kDistanceFloor);
                at(l, i, j) = cfg.length_scale * d;
                at(k, i, j) = cfg.spring_scale / (d * d);
            }
        }
    }

    double& at(std::vector<double>& m, int i, int j) {
        return m[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
    double lij(int i, int j) const {
        return l[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
    double kij(int i, int j) const {
        return k[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }

    double max_length() const {
        double m = 0.0;
        for (double x : l) m = std::max(m, x);
        return m;
    }
};

inline double pair_energy(const SpringSystem& sp, const Point& a, const Point& b, int i, int j) {
    double dx = a.x - b.x, dy = a.y - b.y;
    double dist = std::sqrt(dx * dx + dy * dy);
    double diff = dist - sp.lij(i, j);
    return 0.5 * sp.kij(i, j) * diff * diff;
}

// Gradient contribution of pair (m, i) to node m. Coincident points get a
// zero contribution (the energy term is non-differentiable there).
inline Point pair_gradient(const SpringSystem& sp, const Point& pm, const Point& pi, int m, int i) {
    double dx = pm.x - pi.x, dy = pm.y - pi.y;
    double dist = std::sqrt(dx * dx + dy * dy);
    if (dist < 1e-300) return Point{0.0, 0.0};
    double c = sp.kij(m, i) * (1.0 - sp.lij(m, i) / dist);
    return Point{c * dx, c * dy};
}

inline double full_stress(const SpringSystem& sp, std::span<const Point> p) {
    double e = 0.0;
    for (int i = 0; i < sp.n; ++i)
        for (int j = i + 1; j < sp.n; ++j) e += pair_energy(sp, p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)], i, j);
    return e;
}

inline Point node_gradient(const SpringSystem& sp, std::span<const Point> p, int m) {
    Point g{0.0, 0.0};
    for (int i = 0; i < sp.n; ++i) {
        if (i == m) continue;
        Point t = pair_gradient(sp, p[static_cast<std::size_t>(m)], p[static_cast<std::size_t>(i)], m, i);
        g.x += t.x;
        g.y += t.y;
    }
    return g;
}

// Energy of all terms involving node m; the only part that changes when m moves.
inline double local_energy(const SpringSystem& sp, std::span<const Point> p, int m) {
    double e = 0.0;
    for (int i = 0; i < sp.n; ++i) {
        if (i == m) continue;
        e += pair_energy(sp, p[static_cast<std::size_t>(m)], p[static_cast<std::size_t>(i)], m, i);
    }
    return e;
}

struct Hessian2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

inline Hessian2 node_hessian(const SpringSystem& sp, std::span<const Point> p, int m) {
    Hessian2 h;
    for (int i = 0; i < sp.n; ++i) {
        if (i == m) continue;
        double dx = p[static_cast<std::size_t>(m)].x - p[static_cast<std::size_t>(i)].x;
        double dy = p[static_cast<std::size_t>(m)].y - p[static_cast<std::size_t>(i)].y;
        double d2 = dx * dx + dy * dy;
        double dist = std::sqrt(d2);
        if (dist < 1e-300) continue;
        double d3 = d2 * dist;
        double k = sp.kij(m, i), l = sp.lij(m, i);
        h.xx += k * (1.0 - l * dy * dy / d3);
        h.yy += k * (1.0 - l * dx * dx / d3);
        h.xy += k * l * dx * dy / d3;
    }
    return h;
}

// 64-bit generator bits mapped to [0,1); avoids std distributions, whose
// output is implementation-defined.
inline double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

} // namespace detail

/// Kamada-Kawai spring energy of a configuration against target distances.
inline double layout_stress(std::span<const Point> coords, const LayoutConfig& config,
                            const SquareMatrix& distances) {
    config.validate();
    if (static_cast<int>(coords.size()) != distances.n)
        throw Error("layout_stress: " + std::to_string(coords.size()) + " points vs " +
                    std::to_string(distances.n) + "x" + std::to_string(distances.n) + " distances");
    detail::SpringSystem sp(config, distances);
    return detail::full_stress(sp, coords);
}

/// Analytic per-node stress gradient; matches layout_stress.
inline std::vector<Point> stress_gradient(std::span<const Point> coords, const LayoutConfig& config,
                                          const SquareMatrix& distances) {
    config.validate();
    if (static_cast<int>(coords.size()) != distances.n)
        throw Error("stress_gradient: size mismatch");
    detail::SpringSystem sp(config, distances);
    std::vector<Point> g(coords.size());
    for (int m = 0; m < sp.n; ++m) g[static_cast<std::size_t>(m)] = detail::node_gradient(sp, coords, m);
    return g;
}

// Classic Kamada-Kawai: repeatedly pick the node with the largest gradient
// norm and apply damped 2x2 Newton steps to it until its gradient falls
// below tolerance. A step is accepted only if it lowers the stress, so the
// stress trace is strictly decreasing. Deterministic for a fixed seed.
inline Layout kamada_kawai_distances(const SquareMatrix& distances, const LayoutConfig& config) {
    config.validate();
    const int n = distances.n;
    Layout out;
    out.config = config;
    if (n <= 0) return out;

    detail::SpringSystem sp(config, distances);
    std::vector<Point> p(static_cast<std::size_t>(n));

    // Seeded perturbed circle start.
    double radius = sp.max_length() / 2.0;
    double jitter = (radius > 0 ? radius : 1.0) * 0.01;
    detail::SplitMix64 rng(config.seed);
    for (int i = 0; i < n; ++i) {
        double angle = 2.0 * std::numbers::pi * i / n;
        double jx = (detail::uniform01(rng.next()) * 2.0 - 1.0) * jitter;
        double jy = (detail::uniform01(rng.next()) * 2.0 - 1.0) * jitter;
        p[static_cast<std::size_t>(i)] = Point{radius * std::cos(angle) + jx, radius * std::sin(angle) + jy};
    }

    if (n == 1) {
        out.coords = {Point{0.0, 0.0}};
        out.termination = LayoutTermination::GradientTolerance;
        return out;
    }

    double energy = detail::full_stress(sp, p);
    out.initial_stress = energy;

    std::vector<Point> grad(static_cast<std::size_t>(n));
    auto recompute_all_gradients = [&] {
        for (int i = 0; i < n; ++i) grad[static_cast<std::size_t>(i)] = detail::node_gradient(sp, p, i);
    };
    recompute_all_gradients();
    auto norm = [](const Point& g) { return std::sqrt(g.x * g.x + g.y * g.y); };

    std::vector<char> frozen(static_cast<std::size_t>(n), 0);
    bool resynced_since_move = false;
    std::uint64_t steps = 0;
    std::uint64_t moves_since_resync = 0;
    const double tol = config.gradient_tolerance;
    out.termination = LayoutTermination::GradientTolerance;

    while (true) {
        int m = -1;
        double best = -1.0, best_any = -1.0;
        for (int i = 0; i < n; ++i) {
            double d = norm(grad[static_cast<std::size_t>(i)]);
            best_any = std::max(best_any, d);
            if (!frozen[static_cast<std::size_t>(i)] && d > best) { best = d; m = i; }
        }
        if (best_any <= tol) {
            // Cached gradients drift slightly under incremental updates;
            // confirm convergence from scratch.
            recompute_all_gradients();
            double worst = 0.0;
            for (int i = 0; i < n; ++i) worst = std::max(worst, norm(grad[static_cast<std::size_t>(i)]));
            if (worst <= tol) { out.termination = LayoutTermination::GradientTolerance; break; }
            std::fill(frozen.begin(), frozen.end(), 0);
            continue;
        }
        if (m < 0 || best <= tol) {
            // Every node above tolerance is frozen. Resync once, then give up.
            if (resynced_since_move) { out.termination = LayoutTermination::Stalled; break; }
            recompute_all_gradients();
            std::fill(frozen.begin(), frozen.end(), 0);
            resynced_since_move = true;
            continue;
        }

        bool capped = false;
        for (int inner = 0; inner < 64; ++inner) {
            if (norm(grad[static_cast<std::size_t>(m)]) <= tol) break;
            detail::Hessian2 h = detail::node_hessian(sp, p, m);
            Point g = grad[static_cast<std::size_t>(m)];
            double det = h.xx * h.yy - h.xy * h.xy;
            Point step;
            if (std::fabs(det) > 1e-12) {
                step.x = (-g.x * h.yy + g.y * h.xy) / det;
                step.y = (-h.xx * g.y + h.xy * g.x) / det;
            } else {
                double gn = norm(g);
                step.x = -g.x / gn * 0.1 * config.length_scale;
                step.y = -g.y / gn * 0.1 * config.length_scale;
            }

            Point old = p[static_cast<std::size_t>(m)];
            double local_before = detail::local_energy(sp, p, m);
            double t = 1.0;
            bool accepted = false;
            for (int halving = 0; halving < 30; ++halving, t *= 0.5) {
                p[static_cast<std::size_t>(m)] = Point{old.x + t * step.x, old.y + t * step.y};
                double local_after = detail::local_energy(sp, p, m);
                if (local_after < local_before) {
                    accepted = true;
                    energy += local_after - local_before;
                    break;
                }
            }
            if (!accepted) {
                p[static_cast<std::size_t>(m)] = old;
                frozen[static_cast<std::size_t>(m)] = 1;
                break;
            }

            // Incremental gradient maintenance: only terms involving m changed.
            Point now = p[static_cast<std::size_t>(m)];
            for (int i = 0; i < n; ++i) {
                if (i == m) continue;
                Point before = detail::pair_gradient(sp, p[static_cast<std::size_t>(i)], old, i, m);
                Point after = detail::pair_gradient(sp, p[static_cast<std::size_t>(i)], now, i, m);
                grad[static_cast<std::size_t>(i)].x += after.x - before.x;
                grad[static_cast<std::size_t>(i)].y += after.y - before.y;
            }
            grad[static_cast<std::size_t>(m)] = detail::node_gradient(sp, p, m);

            std::fill(frozen.begin(), frozen.end(), 0);
            resynced_since_move = false;
            ++steps;
            if (config.record_stress_trace) out.stress_trace.push_back(energy);
            if (++moves_since_resync >= 4096) {
                recompute_all_gradients();
                energy = detail::full_stress(sp, p);
                moves_since_resync = 0;
            }
            if (steps >= config.max_node_steps) {
                out.termination = LayoutTermination::IterationCap;
                capped = true;
                break;
            }
        }
        if (capped) break;
    }

    out.node_steps = steps;
    out.final_stress = detail::full_stress(sp, p);

    // Rescale into a unit bounding box centered at the origin; preserves
    // aspect ratio. Stress fields above refer to the optimizer scale.
    double minx = p[0].x, maxx = p[0].x, miny = p[0].y, maxy = p[0].y;
    for (const auto& q : p) {
        minx = std::min(minx, q.x);
        maxx = std::max(maxx, q.x);
        miny = std::min(miny, q.y);
        maxy = std::max(maxy, q.y);
    }
    double cx = (minx + maxx) / 2.0, cy = (miny + maxy) / 2.0;
    double extent = std::max(maxx - minx, maxy - miny);
    double scale = extent > 0 ? 1.0 / extent : 1.0;
    for (auto& q : p) q = Point{(q.x - cx) * scale, (q.y - cy) * scale};
    out.coords = std::move(p);
    return out;
}

inline Layout kamada_kawai(const SimilarityNetwork& net, const LayoutConfig& config) {
    return kamada_kawai_distances(graph_distances(net), config);
}

} // namespace scimap
