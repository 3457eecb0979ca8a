#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "textens/errors.hpp"
#include "textens/text.hpp"

namespace textens {

enum class DistanceMetric { euclidean, manhattan, chebyshev, hamming, cosine };

inline const char* metric_name(DistanceMetric m) {
    switch (m) {
        case DistanceMetric::euclidean: return "euclidean";
        case DistanceMetric::manhattan: return "manhattan";
        case DistanceMetric::chebyshev: return "chebyshev";
        case DistanceMetric::hamming: return "hamming";
        case DistanceMetric::cosine: return "cosine";
    }
    return "?";
}

inline DistanceMetric parse_metric(const std::string& name) {
    if (name == "euclidean") return DistanceMetric::euclidean;
    if (name == "manhattan") return DistanceMetric::manhattan;
    if (name == "chebyshev") return DistanceMetric::chebyshev;
    if (name == "hamming") return DistanceMetric::hamming;
    if (name == "cosine") return DistanceMetric::cosine;
    throw InvalidParams("unknown metric: " + name);
}

namespace distance_detail {

// Walk the union of two sparse supports in dimension order.
template <typename Visit>
void for_each_union(const FeatureVector& x, const FeatureVector& y, Visit&& visit) {
    std::size_t i = 0, j = 0;
    while (i < x.entries.size() || j < y.entries.size()) {
        if (j == y.entries.size() ||
            (i < x.entries.size() && x.entries[i].first < y.entries[j].first)) {
            visit(x.entries[i].second, 0u);
            ++i;
        } else if (i == x.entries.size() || y.entries[j].first < x.entries[i].first) {
            visit(0u, y.entries[j].second);
            ++j;
        } else {
            visit(x.entries[i].second, y.entries[j].second);
            ++i;
            ++j;
        }
    }
}

}  // namespace distance_detail

inline double distance(DistanceMetric metric, const FeatureVector& x,
                       const FeatureVector& y) {
    if (x.dim != y.dim) throw DimensionMismatch(x.dim, y.dim);
    switch (metric) {
        case DistanceMetric::euclidean: {
            double sum = 0.0;
            distance_detail::for_each_union(x, y, [&](std::uint32_t a, std::uint32_t b) {
                double d = static_cast<double>(a) - static_cast<double>(b);
                sum += d * d;
            });
            return std::sqrt(sum);
        }
        case DistanceMetric::manhattan: {
            double sum = 0.0;
            distance_detail::for_each_union(x, y, [&](std::uint32_t a, std::uint32_t b) {
                sum += std::abs(static_cast<double>(a) - static_cast<double>(b));
            });
            return sum;
        }
        case DistanceMetric::chebyshev: {
            double best = 0.0;
            distance_detail::for_each_union(x, y, [&](std::uint32_t a, std::uint32_t b) {
                double d = std::abs(static_cast<double>(a) - static_cast<double>(b));
                if (d > best) best = d;
            });
            return best;
        }
        case DistanceMetric::hamming: {
            double differing = 0.0;
            distance_detail::for_each_union(x, y, [&](std::uint32_t a, std::uint32_t b) {
                if (a != b) differing += 1.0;
            });
            return differing;
        }
        case DistanceMetric::cosine: {
            double dot = 0.0, nx = 0.0, ny = 0.0;
            distance_detail::for_each_union(x, y, [&](std::uint32_t a, std::uint32_t b) {
                double da = static_cast<double>(a);
                double db = static_cast<double>(b);
                dot += da * db;
                nx += da * da;
                ny += db * db;
            });
            if (nx == 0.0 || ny == 0.0) throw ZeroVector();
            // sqrt(nx*ny) keeps d(x,x) exactly zero
            return 1.0 - dot / std::sqrt(nx * ny);
        }
    }
    throw InvalidParams("unreachable metric");
}

}  // namespace textens
