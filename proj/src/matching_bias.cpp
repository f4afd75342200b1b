#include "confound/matching_bias.hpp"

#include <algorithm>
#include <numeric>

#include "confound/error.hpp"

namespace confound::matching {

namespace {

using features::FeatureRecord;

// Records ready for repeated distance evaluation. For wasserstein-1d the
// coordinates are sorted once up front.
class PreparedSet {
public:
    PreparedSet(const std::vector<FeatureRecord>& records, DistanceKind kind) : kind_(kind) {
        order_.resize(records.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(),
                  [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
        for (std::size_t i : order_) {
            ids_.push_back(records[i].id);
            vectors_.push_back(records[i].features);
            if (kind_ == DistanceKind::wasserstein_1d) std::sort(vectors_.back().begin(), vectors_.back().end());
        }
    }

    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    const std::vector<double>& vec(std::size_t i) const { return vectors_[i]; }

    double between(const std::vector<double>& a, const std::vector<double>& b) const {
        if (kind_ != DistanceKind::wasserstein_1d) return distance(a, b, kind_);
        if (a.empty()) return 0.0;
        // Both sides are pre-sorted, so the 1-d transport cost is the plain L1
        // difference averaged over coordinates.
        return distance(a, b, DistanceKind::manhattan) / static_cast<double>(a.size());
    }

    /// Nearest member to `query` (already prepared); ids are ascending so the
    /// first strict minimum is the smallest-id winner.
    std::pair<std::size_t, double> nearest(const std::vector<double>& query) const {
        std::size_t best = 0;
        double best_d = between(query, vectors_[0]);
        for (std::size_t i = 1; i < vectors_.size(); ++i) {
            const double d = between(query, vectors_[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return {best, best_d};
    }

private:
    DistanceKind kind_;
    std::vector<std::size_t> order_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> vectors_;
};

void check_dimensions(const features::Cohort& cohort) {
    const std::size_t dim = cohort.real.front().features.size();
    auto check = [&](const std::vector<FeatureRecord>& set) {
        for (const auto& r : set) {
            if (r.features.size() != dim) {
                throw ValidationError("record '" + r.id + "' has dimension " +
                                      std::to_string(r.features.size()) + ", cohort uses " +
                                      std::to_string(dim));
            }
        }
    };
    check(cohort.real);
    check(cohort.generated);
    for (const auto& [artist, recs] : cohort.peers) check(recs);
}

}  // namespace

MatchPair nearest_neighbor(const FeatureRecord& query, const std::vector<FeatureRecord>& candidates,
                           DistanceKind kind) {
    if (candidates.empty()) throw ValidationError("nearest neighbor over an empty candidate set");
    const FeatureRecord* best = nullptr;
    double best_d = 0.0;
    for (const auto& c : candidates) {
        const double d = distance(query.features, c.features, kind);
        if (!best || d < best_d || (d == best_d && c.id < best->id)) {
            best = &c;
            best_d = d;
        }
    }
    return {query.id, best->id, best_d};
}

BiasReport compute_bias(const features::Cohort& cohort, DistanceKind kind) {
    if (cohort.real.empty() || cohort.generated.empty() || cohort.peers.empty()) {
        throw ValidationError("cohort needs at least one real work, one generated work and one peer");
    }
    check_dimensions(cohort);

    BiasReport report;
    report.focal_artist = cohort.focal_artist;
    report.movement = cohort.movement;
    report.genre = cohort.genre;
    report.material = cohort.material;
    report.real_count = cohort.real.size();
    report.generated_count = cohort.generated.size();
    report.kind = kind;

    const PreparedSet real(cohort.real, kind);
    const PreparedSet generated(cohort.generated, kind);

    double num_sum = 0.0;
    for (std::size_t l = 0; l < generated.size(); ++l) {
        const auto [match, d] = real.nearest(generated.vec(l));
        report.generated_matches.push_back({generated.id(l), real.id(match), d});
        ++report.match_multiplicity[real.id(match)];
        num_sum += d;
    }
    report.numerator = num_sum / static_cast<double>(generated.size());

    double den_sum = 0.0;
    for (const auto& [artist, recs] : cohort.peers) {
        if (recs.empty()) throw ValidationError("peer '" + artist + "' has no works");
        const PreparedSet peer(recs, kind);
        report.peer_sizes[artist] = recs.size();
        auto& trace = report.peer_matches[artist];
        double peer_sum = 0.0;
        for (std::size_t k = 0; k < real.size(); ++k) {
            const auto [match, d] = peer.nearest(real.vec(k));
            trace.push_back({real.id(k), peer.id(match), d});
            peer_sum += d;
        }
        const double mean = peer_sum / static_cast<double>(real.size());
        report.peer_means[artist] = mean;
        den_sum += mean;
    }
    report.denominator = den_sum / static_cast<double>(cohort.peers.size());

    if (report.denominator == 0.0) {
        throw DomainError("degenerate cohort " + cohort.focal_artist + " / " + cohort.movement +
                          ": the focal artist's works coincide with every peer's (denominator is 0)");
    }
    report.bias = report.numerator / report.denominator;
    report.exceeds_one = report.bias > 1.0;
    return report;
}

SimpsonReport simpson_check(const std::vector<features::FeatureRecord>& records,
                            std::string_view focal_artist, std::string_view genre,
                            std::string_view material, const std::vector<std::string>& movements,
                            DistanceKind kind, const features::CohortRules& rules) {
    if (movements.empty()) throw ValidationError("simpson check needs at least one movement");

    SimpsonReport report;
    std::vector<std::string> failures;
    for (const auto& m : movements) {
        const auto name = features::normalize_text(m);
        if (std::find(report.movements.begin(), report.movements.end(), name) != report.movements.end()) continue;
        report.movements.push_back(name);
        try {
            auto cohort = features::build_cohort(records, focal_artist, name, genre, material, rules);
            report.stratified.emplace(name, compute_bias(cohort, kind));
        } catch (const DomainError& e) {
            failures.push_back(name + ": " + e.what());
        }
    }
    try {
        auto pooled = features::build_pooled_cohort(records, focal_artist, report.movements, genre,
                                                    material, rules);
        report.pooled = compute_bias(pooled, kind);
    } catch (const DomainError& e) {
        failures.push_back(std::string("pooled: ") + e.what());
    }
    if (!failures.empty()) {
        std::string msg = "simpson check incomplete:";
        for (const auto& f : failures) msg += " [" + f + "]";
        throw DomainError(msg);
    }

    report.attenuated = std::all_of(report.stratified.begin(), report.stratified.end(),
                                    [&](const auto& kv) { return report.pooled.bias < kv.second.bias; });
    return report;
}

}  // namespace confound::matching
