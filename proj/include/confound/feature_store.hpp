#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "confound/error.hpp"

namespace confound::features {

enum class Provenance { real, generated };

std::string_view to_string(Provenance p);

/// One artwork: metadata plus its learned feature vector.
struct FeatureRecord {
    std::string id;
    std::string artist;
    std::string movement;
    std::string genre;
    std::string material;
    Provenance provenance = Provenance::real;
    std::vector<double> features;
};

struct SummaryKey {
    std::string artist;
    std::string movement;
    std::string genre;
    std::string material;
    Provenance provenance = Provenance::real;

    friend auto operator<=>(const SummaryKey&, const SummaryKey&) = default;
};

struct DatasetSummary {
    std::size_t dimension = 0;
    std::size_t record_count = 0;
    std::map<SummaryKey, std::size_t> counts;
};

/// Records sorted by id, so the result does not depend on input line order.
struct Dataset {
    std::vector<FeatureRecord> records;
    DatasetSummary summary;
    /// Contents of the optional leading `{"header": {...}}` line, else null.
    nlohmann::json header;
};

/// Trims surrounding whitespace and applies Unicode NFC.
std::string normalize_text(std::string_view text);

/// Reads the JSON Lines interchange format. Each non-blank line is an object
/// with exactly `id, artist, movement, genre, material, provenance, features`.
/// A first line of the form `{"header": {...}}` carries producer metadata; a
/// `dimension` entry there is enforced on every record.
///
/// Syntax problems raise ParseError (with line); duplicate ids, dimension
/// mismatches and non-finite values raise ValidationError naming the line.
Dataset parse_records(std::istream& in);
Dataset load_records(const std::filesystem::path& path);

/// Writes records in the interchange format, one per line, in the given order.
void write_records(std::ostream& out, const std::vector<FeatureRecord>& records);

DatasetSummary summarize(const std::vector<FeatureRecord>& records);

struct CohortRules {
    std::size_t min_peer_count = 35;
    /// Strict mode requires more than min_peer_count records instead of at least.
    bool strict = false;

    bool qualifies(std::size_t count) const {
        return strict ? count > min_peer_count : count >= min_peer_count;
    }
};

/// The sets compared by the bias metric: the focal artist's real works (A_i),
/// their generated works (G_i) and every qualifying peer's real works (A_j).
/// All lists are sorted by record id.
struct Cohort {
    std::string focal_artist;
    std::string movement;
    std::string genre;
    std::string material;
    std::vector<FeatureRecord> real;
    std::vector<FeatureRecord> generated;
    std::map<std::string, std::vector<FeatureRecord>> peers;
};

/// Why a cohort could not be assembled. Mirrors a blank table cell: there were
/// not enough instances to compute the metric.
struct CohortInsufficiency {
    std::string focal_artist;
    std::string movement;
    std::string genre;
    std::string material;
    std::size_t real_count = 0;
    std::size_t generated_count = 0;
    /// Matching real-record counts of every other artist, qualifying or not.
    std::map<std::string, std::size_t> peer_counts;
    CohortRules rules;
    std::vector<std::string> reasons;

    std::string describe() const;
};

class InsufficientCohortError : public DomainError {
public:
    explicit InsufficientCohortError(CohortInsufficiency report)
        : DomainError(report.describe()), report_(std::move(report)) {}

    const CohortInsufficiency& report() const noexcept { return report_; }

private:
    CohortInsufficiency report_;
};

/// A_i: focal real records matching (movement, genre, material).
/// G_i: focal generated records matching (genre, material).
/// Peers: other artists with enough real records matching all three.
/// Throws InsufficientCohortError when any of the three is empty.
Cohort build_cohort(const std::vector<FeatureRecord>& records, std::string_view focal_artist,
                    std::string_view movement, std::string_view genre, std::string_view material,
                    const CohortRules& rules = {});

/// Same as build_cohort but with the movement filter widened to any of
/// `movements`: the focal artist's and every peer's works are pooled across
/// them. The cohort's movement reads "A+B".
Cohort build_pooled_cohort(const std::vector<FeatureRecord>& records,
                           std::string_view focal_artist, const std::vector<std::string>& movements,
                           std::string_view genre, std::string_view material,
                           const CohortRules& rules = {});

/// Structural cohort invariants; throws ValidationError on the first breach.
void check_cohort(const Cohort& cohort, const CohortRules& rules = {});

}  // namespace confound::features
