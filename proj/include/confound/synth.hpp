#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "confound/distance.hpp"
#include "confound/feature_store.hpp"
#include "confound/stats.hpp"

namespace confound::synth {

/// Seeded normal/uniform source for one named substream.
///
/// Every substream runs its own std::mt19937_64 seeded with
/// splitmix64(seed XOR fnv1a64(key)). Keys name what is drawn, e.g.
/// "real/monet/Impressionism/landscape", so adding an artist or a genre never
/// shifts the draws of any other substream. Normals use Box-Muller on 53-bit
/// uniforms rather than std::normal_distribution, whose output differs
/// between standard libraries.
class Stream {
public:
    Stream(std::uint64_t seed, std::string_view key);

    /// Uniform on [0, 1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

enum class GeneratorMode { movement_aware, movement_blind };

std::string_view to_string(GeneratorMode mode);
/// Accepts "aware"/"movement-aware" and "blind"/"movement-blind".
GeneratorMode parse_generator_mode(std::string_view name);

struct MovementSpec {
    std::string name;
    std::vector<double> centroid;
    double spread = 1.0;
};

struct GenreSpec {
    std::string name;
    /// Empty: drawn from N(0, artist_spread^2) on substream "genre/<name>".
    std::vector<double> offset;
};

struct Membership {
    std::string movement;
    /// Empty: drawn from N(0, artist_spread^2) on substream "offset/<artist>/<movement>".
    std::vector<double> offset;
    std::size_t real_count = 0;  // per genre
};

struct ArtistSpec {
    std::string name;
    std::vector<Membership> memberships;
    /// Focal artists also receive generated works.
    bool focal = false;
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t dimension = 16;
    std::vector<MovementSpec> movements;
    std::vector<GenreSpec> genres;
    std::string material = "oil";
    std::vector<ArtistSpec> artists;
    std::size_t generated_count = 30;  // L per focal artist and genre
    GeneratorMode mode = GeneratorMode::movement_blind;
    double artist_spread = 1.0;
};

/// Throws ValidationError on the first broken constraint.
void validate_config(const SynthConfig& config);

/// Real works: centroid(movement) + offset(artist, movement) + offset(genre) +
/// spread(movement) * N(0, I), real_count per genre.
/// Generated works (focal artists, generated_count per genre):
///   movement-aware: drawn like the artist's real works, picking the movement
///                   in proportion to its real_count;
///   movement-blind: grand mean of all movement centroids + offset(genre) +
///                   pooled spread * N(0, I), where pooled spread is the root
///                   mean square of the movement spreads.
/// Output is sorted by record id.
std::vector<features::FeatureRecord> generate_dataset(const SynthConfig& config);

SynthConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SynthConfig& config);

/// Knobs shared by the built-in presets.
struct PresetOptions {
    double separation = 36.0;  // distance between the two movement centroids
    double spread = 1.0;
    std::size_t dimension = 16;
};

/// Named standard experiments:
///   "paper-shape"  two movements, four genres; one single-movement focal
///                  artist per movement plus one focal artist working in both,
///                  three peers per movement.
///   "two-movement" one genre; only the dual-movement focal artist and peers.
///   "minimal"      one movement, one genre, one focal artist, two peers.
/// Artist offsets are drawn from the seed, so the resolved config depends on it.
SynthConfig preset_config(std::string_view preset, std::uint64_t seed, GeneratorMode mode,
                          const PresetOptions& options = {});

std::vector<std::string> preset_names();

/// Standard seed list for every stochastic check.
std::vector<std::uint64_t> standard_seeds();

struct ScenarioSpec {
    std::string preset = "paper-shape";
    std::uint64_t seed = 1;
    GeneratorMode mode = GeneratorMode::movement_blind;
    PresetOptions options;
    double alpha = 0.05;
    stats::GroupMode group_mode = stats::GroupMode::unpaired;
};

struct ScenarioScore {
    std::string artist;
    std::string movement;
    std::string genre;
    bool multi_movement = false;
    double numerator = 0.0;
    double denominator = 0.0;
    double bias = 0.0;
};

struct ScenarioReport {
    std::string preset;
    std::uint64_t seed = 0;
    GeneratorMode mode = GeneratorMode::movement_blind;
    matching::DistanceKind kind = matching::DistanceKind::euclidean;
    std::size_t record_count = 0;
    std::vector<ScenarioScore> scores;
    /// Mean score per focal artist and the artists ordered by it, highest first.
    std::map<std::string, double> artist_means;
    std::vector<std::string> ordering;
    /// Single- vs multi-movement group test; absent unless both groups exist.
    std::optional<stats::GroupComparison> comparison;
};

/// Generates the preset's data, scores every focal artist in every movement
/// they work in and every genre, and compares single- against multi-movement
/// artists. Cohort failures propagate as InsufficientCohortError.
ScenarioReport run_scenario(const ScenarioSpec& spec, matching::DistanceKind kind);
ScenarioReport run_scenario(const SynthConfig& config, std::string_view name,
                            matching::DistanceKind kind, double alpha = 0.05,
                            stats::GroupMode group_mode = stats::GroupMode::unpaired);

}  // namespace confound::synth
