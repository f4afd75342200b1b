#include "confound/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "confound/error.hpp"

namespace confound::matching {

std::string_view to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::euclidean: return "euclidean";
        case DistanceKind::manhattan: return "manhattan";
        case DistanceKind::chebyshev: return "chebyshev";
        case DistanceKind::wasserstein_1d: return "wasserstein-1d";
    }
    return "?";
}

DistanceKind parse_distance_kind(std::string_view name) {
    for (auto kind : {DistanceKind::euclidean, DistanceKind::manhattan, DistanceKind::chebyshev,
                      DistanceKind::wasserstein_1d}) {
        if (name == to_string(kind)) return kind;
    }
    throw ValidationError("unknown distance '" + std::string(name) +
                          "' (expected euclidean, manhattan, chebyshev or wasserstein-1d)");
}

double distance(std::span<const double> u, std::span<const double> v, DistanceKind kind) {
    if (u.size() != v.size()) {
        throw ValidationError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                              std::to_string(v.size()));
    }
    const std::size_t n = u.size();
    switch (kind) {
        case DistanceKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
            return std::sqrt(s);
        }
        case DistanceKind::manhattan: {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += std::abs(u[i] - v[i]);
            return s;
        }
        case DistanceKind::chebyshev: {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(u[i] - v[i]));
            return m;
        }
        case DistanceKind::wasserstein_1d: {
            if (n == 0) return 0.0;
            std::vector<double> a(u.begin(), u.end()), b(v.begin(), v.end());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
            return s / static_cast<double>(n);
        }
    }
    return 0.0;
}

}  // namespace confound::matching
