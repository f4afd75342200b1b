#pragma once

#include <span>
#include <string_view>

namespace confound::matching {

enum class DistanceKind { euclidean, manhattan, chebyshev, wasserstein_1d };

std::string_view to_string(DistanceKind kind);

/// Accepts "euclidean", "manhattan", "chebyshev", "wasserstein-1d".
DistanceKind parse_distance_kind(std::string_view name);

/// Distance between two equal-length feature vectors. wasserstein-1d treats
/// each vector as an equal-weight empirical distribution over its coordinates
/// and returns the mean absolute difference of the sorted coordinates.
/// Throws ValidationError on a length mismatch.
double distance(std::span<const double> u, std::span<const double> v, DistanceKind kind);

}  // namespace confound::matching
