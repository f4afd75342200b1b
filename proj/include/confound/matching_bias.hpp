#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "confound/distance.hpp"
#include "confound/feature_store.hpp"

namespace confound::matching {

struct MatchPair {
    std::string query_id;
    std::string match_id;
    double distance = 0.0;
};

/// Exhaustive nearest-neighbor scan; equal distances go to the smallest
/// candidate id. Throws ValidationError on an empty candidate list or a
/// dimension mismatch.
MatchPair nearest_neighbor(const features::FeatureRecord& query,
                           const std::vector<features::FeatureRecord>& candidates,
                           DistanceKind kind);

/// Confounding-bias score of one cohort with its full match trace.
///
///   numerator   = mean over generated g of d(g, nearest real work of the artist)
///   denominator = mean over peers j of (mean over real works a of d(a, nearest work of j))
///   bias        = numerator / denominator
///
/// A low score means the generated works sit as close to the artist's real
/// works as the artist's works sit to same-movement peers; scores above one
/// are flagged in `exceeds_one`.
struct BiasReport {
    std::string focal_artist;
    std::string movement;
    std::string genre;
    std::string material;
    std::size_t real_count = 0;       // K
    std::size_t generated_count = 0;  // L
    std::map<std::string, std::size_t> peer_sizes;  // J entries, R_j each

    DistanceKind kind = DistanceKind::euclidean;
    double numerator = 0.0;
    double denominator = 0.0;
    double bias = 0.0;
    bool exceeds_one = false;

    std::vector<MatchPair> generated_matches;                     // L entries, by generated id
    std::map<std::string, std::vector<MatchPair>> peer_matches;   // K entries per peer, by real id
    std::map<std::string, double> peer_means;
    /// How many generated works matched each real work (matching is with replacement).
    std::map<std::string, std::size_t> match_multiplicity;
};

/// Evaluates the metric on a cohort. Summation runs in record-id order, so the
/// result is bit-identical under any reordering of the cohort's lists.
/// Throws DomainError when the denominator is zero.
BiasReport compute_bias(const features::Cohort& cohort, DistanceKind kind);

struct SimpsonReport {
    std::vector<std::string> movements;
    std::map<std::string, BiasReport> stratified;
    BiasReport pooled;
    /// Pooled score strictly below every stratified score.
    bool attenuated = false;
};

/// Compares per-movement scores with the score of the cohort pooled across
/// `movements`. Throws DomainError listing every movement (or the pooled case)
/// whose cohort cannot be built.
SimpsonReport simpson_check(const std::vector<features::FeatureRecord>& records,
                            std::string_view focal_artist, std::string_view genre,
                            std::string_view material, const std::vector<std::string>& movements,
                            DistanceKind kind, const features::CohortRules& rules = {});

}  // namespace confound::matching
