#include "confound/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "confound/error.hpp"
#include "confound/matching_bias.hpp"

namespace confound::synth {

namespace {

using features::FeatureRecord;
using features::Provenance;
using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::vector<double> draw_vector(Stream& stream, std::size_t dim, double scale) {
    std::vector<double> v(dim);
    for (auto& x : v) x = scale * stream.normal();
    return v;
}

std::string numbered(char prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%04zu", prefix, i);
    return buf;
}

const MovementSpec& movement_named(const SynthConfig& cfg, const std::string& name) {
    for (const auto& m : cfg.movements) {
        if (m.name == name) return m;
    }
    throw ValidationError("unknown movement '" + name + "'");
}

// Per-artist style offsets and per-genre offsets with empty entries filled in.
struct ResolvedOffsets {
    std::map<std::pair<std::string, std::string>, std::vector<double>> artist;
    std::map<std::string, std::vector<double>> genre;
};

ResolvedOffsets resolve_offsets(const SynthConfig& cfg) {
    ResolvedOffsets out;
    for (const auto& g : cfg.genres) {
        if (!g.offset.empty()) {
            out.genre[g.name] = g.offset;
        } else {
            Stream s(cfg.seed, "genre/" + g.name);
            out.genre[g.name] = draw_vector(s, cfg.dimension, cfg.artist_spread);
        }
    }
    for (const auto& a : cfg.artists) {
        for (const auto& m : a.memberships) {
            auto& slot = out.artist[{a.name, m.movement}];
            if (!m.offset.empty()) {
                slot = m.offset;
            } else {
                Stream s(cfg.seed, "offset/" + a.name + "/" + m.movement);
                slot = draw_vector(s, cfg.dimension, cfg.artist_spread);
            }
        }
    }
    return out;
}

void add_noisy(std::vector<double>& out, const std::vector<double>& mean, double spread, Stream& s) {
    out.resize(mean.size());
    for (std::size_t k = 0; k < mean.size(); ++k) out[k] = mean[k] + spread * s.normal();
}

std::vector<double> sum_of(std::initializer_list<const std::vector<double>*> parts, std::size_t dim) {
    std::vector<double> out(dim, 0.0);
    for (const auto* p : parts) {
        for (std::size_t k = 0; k < dim; ++k) out[k] += (*p)[k];
    }
    return out;
}

std::vector<double> vec_from(const json& j, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError(std::string(what) + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::string_view key) : engine_(splitmix64(seed ^ fnv1a64(key))) {}

double Stream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

std::string_view to_string(GeneratorMode mode) {
    return mode == GeneratorMode::movement_aware ? "movement-aware" : "movement-blind";
}

GeneratorMode parse_generator_mode(std::string_view name) {
    if (name == "aware" || name == "movement-aware") return GeneratorMode::movement_aware;
    if (name == "blind" || name == "movement-blind") return GeneratorMode::movement_blind;
    throw ValidationError("unknown generator mode '" + std::string(name) + "' (expected aware or blind)");
}

void validate_config(const SynthConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ValidationError("invalid synth config: " + msg); };
    const std::size_t d = cfg.dimension;
    if (d < 2) fail("dimension must be at least 2");
    if (cfg.movements.empty()) fail("at least one movement is required");
    if (cfg.genres.empty()) fail("at least one genre is required");
    if (cfg.artists.empty()) fail("at least one artist is required");
    if (cfg.generated_count < 1) fail("generated count must be at least 1");
    if (!(cfg.artist_spread > 0.0) || !std::isfinite(cfg.artist_spread)) fail("artist spread must be positive");

    std::set<std::string> movement_names, genre_names, artist_names;
    for (const auto& m : cfg.movements) {
        if (m.name.empty() || !movement_names.insert(m.name).second) fail("movement names must be unique and nonempty");
        if (m.centroid.size() != d) fail("centroid of '" + m.name + "' has the wrong dimension");
        if (!(m.spread > 0.0) || !std::isfinite(m.spread)) fail("spread of '" + m.name + "' must be positive");
    }
    for (const auto& g : cfg.genres) {
        if (g.name.empty() || !genre_names.insert(g.name).second) fail("genre names must be unique and nonempty");
        if (!g.offset.empty() && g.offset.size() != d) fail("offset of genre '" + g.name + "' has the wrong dimension");
    }
    bool any_focal = false;
    for (const auto& a : cfg.artists) {
        if (a.name.empty() || !artist_names.insert(a.name).second) fail("artist names must be unique and nonempty");
        if (a.memberships.empty()) fail("artist '" + a.name + "' belongs to no movement");
        std::set<std::string> seen;
        for (const auto& m : a.memberships) {
            if (!movement_names.count(m.movement)) fail("artist '" + a.name + "' references undeclared movement '" + m.movement + "'");
            if (!seen.insert(m.movement).second) fail("artist '" + a.name + "' lists '" + m.movement + "' twice");
            if (m.real_count < 1) fail("artist '" + a.name + "' needs at least one real work per movement");
            if (!m.offset.empty() && m.offset.size() != d) fail("offset of '" + a.name + "' has the wrong dimension");
        }
        any_focal = any_focal || a.focal;
    }
    if (!any_focal) fail("at least one artist must be focal");
    for (const auto& v : {cfg.material}) {
        if (v.empty()) fail("material must be nonempty");
    }
}

std::vector<FeatureRecord> generate_dataset(const SynthConfig& cfg) {
    validate_config(cfg);
    const std::size_t d = cfg.dimension;
    const auto offsets = resolve_offsets(cfg);

    std::vector<double> grand_mean(d, 0.0);
    double mean_sq_spread = 0.0;
    for (const auto& m : cfg.movements) {
        for (std::size_t k = 0; k < d; ++k) grand_mean[k] += m.centroid[k] / static_cast<double>(cfg.movements.size());
        mean_sq_spread += m.spread * m.spread / static_cast<double>(cfg.movements.size());
    }
    const double pooled_spread = std::sqrt(mean_sq_spread);

    std::vector<FeatureRecord> out;
    for (const auto& artist : cfg.artists) {
        for (const auto& genre : cfg.genres) {
            const auto& genre_offset = offsets.genre.at(genre.name);
            for (const auto& member : artist.memberships) {
                const auto& mv = movement_named(cfg, member.movement);
                const auto mean = sum_of({&mv.centroid, &offsets.artist.at({artist.name, mv.name}), &genre_offset}, d);
                Stream s(cfg.seed, "real/" + artist.name + "/" + mv.name + "/" + genre.name);
                for (std::size_t i = 0; i < member.real_count; ++i) {
                    FeatureRecord r{artist.name + "/" + mv.name + "/" + genre.name + "/" + numbered('r', i),
                                    artist.name, mv.name, genre.name, cfg.material, Provenance::real, {}};
                    add_noisy(r.features, mean, mv.spread, s);
                    out.push_back(std::move(r));
                }
            }
            if (!artist.focal) continue;

            Stream s(cfg.seed, "generated/" + artist.name + "/" + genre.name);
            std::size_t total_count = 0;
            for (const auto& m : artist.memberships) total_count += m.real_count;
            const auto blind_mean = sum_of({&grand_mean, &genre_offset}, d);
            for (std::size_t i = 0; i < cfg.generated_count; ++i) {
                FeatureRecord r{artist.name + "/generated/" + genre.name + "/" + numbered('g', i),
                                artist.name, "unlabeled", genre.name, cfg.material, Provenance::generated, {}};
                if (cfg.mode == GeneratorMode::movement_blind) {
                    add_noisy(r.features, blind_mean, pooled_spread, s);
                } else {
                    // Pick a movement in proportion to the artist's real output.
                    const double u = s.uniform() * static_cast<double>(total_count);
                    const Membership* pick = &artist.memberships.back();
                    double acc = 0.0;
                    for (const auto& m : artist.memberships) {
                        acc += static_cast<double>(m.real_count);
                        if (u < acc) {
                            pick = &m;
                            break;
                        }
                    }
                    const auto& mv = movement_named(cfg, pick->movement);
                    const auto mean = sum_of({&mv.centroid, &offsets.artist.at({artist.name, mv.name}), &genre_offset}, d);
                    add_noisy(r.features, mean, mv.spread, s);
                }
                out.push_back(std::move(r));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

SynthConfig config_from_json(const json& doc) {
    try {
        SynthConfig cfg;
        cfg.seed = doc.value("seed", std::uint64_t{1});
        cfg.dimension = doc.at("dimension").get<std::size_t>();
        cfg.material = doc.value("material", std::string("oil"));
        cfg.generated_count = doc.value("generated_count", std::size_t{30});
        cfg.mode = parse_generator_mode(doc.value("mode", std::string("blind")));
        cfg.artist_spread = doc.value("artist_spread", 1.0);
        for (const auto& m : doc.at("movements")) {
            cfg.movements.push_back({m.at("name").get<std::string>(), vec_from(m.at("centroid"), "centroid"),
                                     m.value("spread", 1.0)});
        }
        for (const auto& g : doc.at("genres")) {
            if (g.is_string()) {
                cfg.genres.push_back({g.get<std::string>(), {}});
            } else {
                cfg.genres.push_back({g.at("name").get<std::string>(),
                                      g.contains("offset") ? vec_from(g["offset"], "genre offset") : std::vector<double>{}});
            }
        }
        for (const auto& a : doc.at("artists")) {
            ArtistSpec artist{a.at("name").get<std::string>(), {}, a.value("focal", false)};
            for (const auto& m : a.at("memberships")) {
                artist.memberships.push_back({m.at("movement").get<std::string>(),
                                              m.contains("offset") ? vec_from(m["offset"], "offset") : std::vector<double>{},
                                              m.at("real_count").get<std::size_t>()});
            }
            cfg.artists.push_back(std::move(artist));
        }
        validate_config(cfg);
        return cfg;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid synth config: ") + e.what());
    }
}

json config_to_json(const SynthConfig& cfg) {
    json doc;
    doc["seed"] = cfg.seed;
    doc["dimension"] = cfg.dimension;
    doc["material"] = cfg.material;
    doc["generated_count"] = cfg.generated_count;
    doc["mode"] = cfg.mode == GeneratorMode::movement_aware ? "aware" : "blind";
    doc["artist_spread"] = cfg.artist_spread;
    doc["movements"] = json::array();
    for (const auto& m : cfg.movements) {
        doc["movements"].push_back({{"name", m.name}, {"centroid", m.centroid}, {"spread", m.spread}});
    }
    doc["genres"] = json::array();
    for (const auto& g : cfg.genres) {
        json gj{{"name", g.name}};
        if (!g.offset.empty()) gj["offset"] = g.offset;
        doc["genres"].push_back(gj);
    }
    doc["artists"] = json::array();
    for (const auto& a : cfg.artists) {
        json aj{{"name", a.name}, {"focal", a.focal}, {"memberships", json::array()}};
        for (const auto& m : a.memberships) {
            json mj{{"movement", m.movement}, {"real_count", m.real_count}};
            if (!m.offset.empty()) mj["offset"] = m.offset;
            aj["memberships"].push_back(mj);
        }
        doc["artists"].push_back(aj);
    }
    return doc;
}

std::vector<std::string> preset_names() { return {"minimal", "paper-shape", "two-movement"}; }

std::vector<std::uint64_t> standard_seeds() {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
    return seeds;
}

SynthConfig preset_config(std::string_view preset, std::uint64_t seed, GeneratorMode mode,
                          const PresetOptions& options) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), preset) == names.end()) {
        throw ValidationError("unknown preset '" + std::string(preset) + "'");
    }
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.mode = mode;
    cfg.dimension = options.dimension;
    cfg.artist_spread = 1.0;
    cfg.generated_count = 30;
    const std::size_t d = options.dimension;

    // Movements sit on the main diagonal, symmetric about the origin, so the
    // separation shows up in every coordinate.
    const double half = options.separation / 2.0 / std::sqrt(static_cast<double>(d));
    const std::string imp = "Impressionism", post = "PostImpressionism";
    cfg.movements.push_back({imp, std::vector<double>(d, -half), options.spread});
    if (preset != "minimal") cfg.movements.push_back({post, std::vector<double>(d, half), options.spread});

    // Style offset of an artist in one movement: a seeded personal signature of
    // scale `style`, pulled a fraction `pull` of the way toward the grand mean.
    auto offset = [&](const std::string& artist, const std::string& movement, double style, double pull) {
        Stream s(seed, "preset/offset/" + artist + "/" + movement);
        auto v = draw_vector(s, d, style);
        const auto& c = movement_named(cfg, movement).centroid;
        for (std::size_t k = 0; k < d; ++k) v[k] += pull * (0.0 - c[k]);
        return v;
    };
    // Impressionist styles are more distinct from one another than
    // post-impressionist ones, which separates the two single-movement focal
    // artists' scores.
    const double imp_style = 2.0, post_style = 1.0;
    // The dual-movement artist's works in each movement lean toward the other.
    const double dual_pull = 0.75;

    auto add = [&](std::string name, bool focal, std::vector<std::tuple<std::string, double, double, std::size_t>> ms) {
        ArtistSpec a{std::move(name), {}, focal};
        for (auto& [movement, style, pull, count] : ms) {
            a.memberships.push_back({movement, offset(a.name, movement, style, pull), count});
        }
        cfg.artists.push_back(std::move(a));
    };

    if (preset == "minimal") {
        cfg.genres.push_back({"landscape", {}});
        add("monet", true, {{imp, imp_style, 0.0, 40}});
        add("imp_peer_1", false, {{imp, imp_style, 0.0, 40}});
        add("imp_peer_2", false, {{imp, imp_style, 0.0, 40}});
        return cfg;
    }

    if (preset == "paper-shape") {
        for (const char* g : {"landscape", "cityscape", "flowers", "still_life"}) cfg.genres.push_back({g, {}});
        add("monet", true, {{imp, imp_style, 0.0, 60}});
        add("van_gogh", true, {{post, post_style, 0.0, 60}});
    } else {
        cfg.genres.push_back({"landscape", {}});
    }
    add("cezanne", true, {{imp, 1.0, dual_pull, 40}, {post, 1.0, dual_pull, 60}});
    for (int i = 1; i <= 3; ++i) {
        add("imp_peer_" + std::to_string(i), false, {{imp, imp_style, 0.0, 40}});
        add("post_peer_" + std::to_string(i), false, {{post, post_style, 0.0, 40}});
    }
    return cfg;
}

ScenarioReport run_scenario(const ScenarioSpec& spec, matching::DistanceKind kind) {
    const auto cfg = preset_config(spec.preset, spec.seed, spec.mode, spec.options);
    return run_scenario(cfg, spec.preset, kind, spec.alpha, spec.group_mode);
}

ScenarioReport run_scenario(const SynthConfig& cfg, std::string_view name, matching::DistanceKind kind,
                            double alpha, stats::GroupMode group_mode) {
    const auto records = generate_dataset(cfg);

    ScenarioReport report;
    report.preset = std::string(name);
    report.seed = cfg.seed;
    report.mode = cfg.mode;
    report.kind = kind;
    report.record_count = records.size();

    std::vector<double> single, multi;
    std::map<std::string, std::pair<double, std::size_t>> per_artist;
    for (const auto& artist : cfg.artists) {
        if (!artist.focal) continue;
        const bool is_multi = artist.memberships.size() > 1;
        for (const auto& genre : cfg.genres) {
            for (const auto& m : artist.memberships) {
                const auto cohort = features::build_cohort(records, artist.name, m.movement, genre.name, cfg.material);
                const auto bias = matching::compute_bias(cohort, kind);
                report.scores.push_back({artist.name, m.movement, genre.name, is_multi, bias.numerator,
                                         bias.denominator, bias.bias});
                (is_multi ? multi : single).push_back(bias.bias);
                auto& acc = per_artist[artist.name];
                acc.first += bias.bias;
                ++acc.second;
            }
        }
    }
    for (const auto& [artist, acc] : per_artist) {
        report.artist_means[artist] = acc.first / static_cast<double>(acc.second);
        report.ordering.push_back(artist);
    }
    std::sort(report.ordering.begin(), report.ordering.end(), [&](const auto& a, const auto& b) {
        const double ma = report.artist_means.at(a), mb = report.artist_means.at(b);
        return ma != mb ? ma > mb : a < b;
    });
    if (!single.empty() && !multi.empty()) {
        report.comparison = stats::compare_movement_groups(single, multi, alpha, group_mode);
    }
    return report;
}

}  // namespace confound::synth
