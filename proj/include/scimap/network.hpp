#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "scimap/matrix.hpp"
#include "scimap/text.hpp"

namespace scimap {

struct SquareMatrix {
    int n = 0;
    std::vector<double> v;

    SquareMatrix() = default;
    explicit SquareMatrix(int n_, double fill = 0.0)
        : n(n_), v(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), fill) {}

    double& at(int i, int j) {
        return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
    double at(int i, int j) const {
        return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
};

struct WeightedEdge {
    int a = 0, b = 0; // a < b
    double w = 0.0;

    bool operator==(const WeightedEdge&) const = default;
};

// Undirected thresholded similarity network: an edge exists iff
// sim(i, j) > threshold, strictly.
struct SimilarityNetwork {
    int node_count = 0;
    double threshold = 0.0;
    std::vector<WeightedEdge> edges; // sorted by (a, b)

    bool has_edges() const { return !edges.empty(); }
};

inline SimilarityNetwork build_network(const SimilarityMatrix& sim, double tau) {
    if (!(tau >= 0.0 && tau < 1.0))
        throw Error("threshold must satisfy 0 <= tau < 1, got " + format_double(tau));
    SimilarityNetwork net;
    net.node_count = sim.size();
    net.threshold = tau;
    for (int i = 0; i < sim.size(); ++i) {
        for (int j = i + 1; j < sim.size(); ++j) {
            double w = sim.at(i, j);
            if (w > tau) net.edges.push_back(WeightedEdge{i, j, w});
        }
    }
    return net;
}

// All-pairs shortest paths with edge length 1 - w. Disconnected pairs get
// a finite pseudo-distance of 1.5x the longest finite shortest path (1.5
// flat when the network has no finite path at all), so isolates still
// participate in the layout.
inline SquareMatrix graph_distances(const SimilarityNetwork& net) {
    const int n = net.node_count;
    const double inf = std::numeric_limits<double>::infinity();
    SquareMatrix d(n, inf);
    for (int i = 0; i < n; ++i) d.at(i, i) = 0.0;
    for (const auto& e : net.edges) {
        double len = 1.0 - e.w;
        if (len < d.at(e.a, e.b)) {
            d.at(e.a, e.b) = len;
            d.at(e.b, e.a) = len;
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            double dik = d.at(i, k);
            if (dik == inf) continue;
            for (int j = 0; j < n; ++j) {
                double alt = dik + d.at(k, j);
                if (alt < d.at(i, j)) d.at(i, j) = alt;
            }
        }
    }
    double max_finite = 0.0;
    bool any_finite = false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double x = d.at(i, j);
            if (x != inf) {
                any_finite = true;
                if (x > max_finite) max_finite = x;
            }
        }
    }
    double base = (any_finite && max_finite > 0.0) ? max_finite : 1.0;
    double pseudo = 1.5 * base;
    for (auto& x : d.v)
        if (x == inf) x = pseudo;
    return d;
}

} // namespace scimap
