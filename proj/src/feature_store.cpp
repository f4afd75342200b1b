#include "confound/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace confound::features {

namespace {

using nlohmann::json;

const std::vector<std::string>& record_fields() {
    static const std::vector<std::string> fields{"id",       "artist",     "movement", "genre",
                                                 "material", "provenance", "features"};
    return fields;
}

std::string at_line(std::size_t line, const std::string& msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
    return normalize_text(v.get<std::string>());
}

FeatureRecord parse_record(const json& obj, std::size_t line) {
    for (const auto& key : record_fields()) {
        if (!obj.contains(key)) throw ParseError("missing field '" + key + "'", line);
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(record_fields().begin(), record_fields().end(), key) == record_fields().end()) {
            throw ParseError("unexpected field '" + key + "'", line);
        }
    }

    FeatureRecord rec;
    rec.id = string_field(obj, "id", line);
    if (rec.id.empty()) throw ValidationError(at_line(line, "record id must be nonempty"));
    rec.artist = string_field(obj, "artist", line);
    rec.movement = string_field(obj, "movement", line);
    rec.genre = string_field(obj, "genre", line);
    rec.material = string_field(obj, "material", line);

    const std::string prov = string_field(obj, "provenance", line);
    if (prov == "real") {
        rec.provenance = Provenance::real;
    } else if (prov == "generated") {
        rec.provenance = Provenance::generated;
    } else {
        throw ParseError("provenance must be \"real\" or \"generated\", got \"" + prov + "\"", line);
    }

    const auto& feats = obj.at("features");
    if (!feats.is_array()) throw ParseError("field 'features' must be an array", line);
    rec.features.reserve(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) {
        if (!feats[i].is_number()) {
            throw ParseError("feature " + std::to_string(i) + " is not a number", line);
        }
        const double v = feats[i].get<double>();
        if (!std::isfinite(v)) {
            throw ValidationError(at_line(line, "record '" + rec.id + "' feature " +
                                                    std::to_string(i) + " is not finite"));
        }
        rec.features.push_back(v);
    }
    return rec;
}

bool matches(const FeatureRecord& r, std::string_view genre, std::string_view material) {
    return r.genre == genre && r.material == material;
}

bool by_id(const FeatureRecord& a, const FeatureRecord& b) { return a.id < b.id; }

Cohort assemble(const std::vector<FeatureRecord>& records, const std::string& focal,
                const std::set<std::string>& movements, const std::string& movement_label,
                const std::string& genre, const std::string& material, const CohortRules& rules) {
    Cohort cohort{focal, movement_label, genre, material, {}, {}, {}};
    std::map<std::string, std::vector<FeatureRecord>> others;
    for (const auto& r : records) {
        if (!matches(r, genre, material)) continue;
        if (r.provenance == Provenance::generated) {
            if (r.artist == focal) cohort.generated.push_back(r);
            continue;
        }
        if (!movements.count(r.movement)) continue;
        if (r.artist == focal) {
            cohort.real.push_back(r);
        } else {
            others[r.artist].push_back(r);
        }
    }

    CohortInsufficiency report{focal, movement_label, genre, material,
                               cohort.real.size(), cohort.generated.size(), {}, rules, {}};
    for (auto& [artist, recs] : others) {
        report.peer_counts[artist] = recs.size();
        if (rules.qualifies(recs.size())) {
            std::sort(recs.begin(), recs.end(), by_id);
            cohort.peers.emplace(artist, std::move(recs));
        }
    }
    if (cohort.real.empty()) report.reasons.emplace_back("no real works of the focal artist");
    if (cohort.generated.empty()) report.reasons.emplace_back("no generated works of the focal artist");
    if (cohort.peers.empty()) report.reasons.emplace_back("insufficient peers");
    if (!report.reasons.empty()) throw InsufficientCohortError(std::move(report));

    std::sort(cohort.real.begin(), cohort.real.end(), by_id);
    std::sort(cohort.generated.begin(), cohort.generated.end(), by_id);
    return cohort;
}

}  // namespace

std::string_view to_string(Provenance p) { return p == Provenance::real ? "real" : "generated"; }

std::string normalize_text(std::string_view text) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    if (std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
        return std::string(text);
    }

    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    const auto source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw ValidationError("text is not valid Unicode: '" + std::string(text) + "'");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

Dataset parse_records(std::istream& in) {
    Dataset data;
    std::map<std::string, std::size_t> id_lines;
    std::size_t expected_dim = 0;
    bool have_dim = false;
    bool first = true;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no,
                             e.byte == 0 ? 0 : e.byte);
        } catch (const json::out_of_range& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": non-finite feature value (" + e.what() + ")");
        }
        if (!obj.is_object()) throw ParseError("each line must be a JSON object", line_no);

        if (obj.size() == 1 && obj.contains("header")) {
            if (!first) throw ParseError("header record must be the first line", line_no);
            if (!obj["header"].is_object()) throw ParseError("header must be an object", line_no);
            data.header = obj["header"];
            if (data.header.contains("dimension")) {
                const auto& d = data.header["dimension"];
                if (!d.is_number_unsigned()) throw ParseError("header dimension must be a nonnegative integer", line_no);
                expected_dim = d.get<std::size_t>();
                have_dim = true;
            }
            first = false;
            continue;
        }
        first = false;

        FeatureRecord rec = parse_record(obj, line_no);
        if (!have_dim) {
            expected_dim = rec.features.size();
            have_dim = true;
        }
        if (rec.features.size() != expected_dim) {
            throw ValidationError(at_line(line_no, "dimension mismatch: record '" + rec.id + "' has " +
                                                       std::to_string(rec.features.size()) +
                                                       " features, expected " +
                                                       std::to_string(expected_dim)));
        }
        if (auto [it, fresh] = id_lines.emplace(rec.id, line_no); !fresh) {
            throw ValidationError(at_line(line_no, "duplicate id '" + rec.id + "' (first seen on line " +
                                                       std::to_string(it->second) + ")"));
        }
        data.records.push_back(std::move(rec));
    }

    std::sort(data.records.begin(), data.records.end(), by_id);
    data.summary = summarize(data.records);
    if (have_dim) data.summary.dimension = expected_dim;
    return data;
}

Dataset load_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open feature file '" + path.string() + "'");
    return parse_records(in);
}

void write_records(std::ostream& out, const std::vector<FeatureRecord>& records) {
    for (const auto& r : records) {
        json obj = json::object();
        obj["id"] = r.id;
        obj["artist"] = r.artist;
        obj["movement"] = r.movement;
        obj["genre"] = r.genre;
        obj["material"] = r.material;
        obj["provenance"] = std::string(to_string(r.provenance));
        obj["features"] = r.features;
        out << obj.dump() << '\n';
    }
}

DatasetSummary summarize(const std::vector<FeatureRecord>& records) {
    DatasetSummary s;
    s.record_count = records.size();
    if (!records.empty()) s.dimension = records.front().features.size();
    for (const auto& r : records) {
        ++s.counts[SummaryKey{r.artist, r.movement, r.genre, r.material, r.provenance}];
    }
    return s;
}

std::string CohortInsufficiency::describe() const {
    std::string out = "cohort " + focal_artist + " / " + movement + " / " + genre + " / " + material +
                      " cannot be built: ";
    for (std::size_t i = 0; i < reasons.size(); ++i) out += (i ? "; " : "") + reasons[i];
    out += " (K=" + std::to_string(real_count) + ", L=" + std::to_string(generated_count) +
           ", peers need " + (rules.strict ? "> " : ">= ") + std::to_string(rules.min_peer_count) + ")";
    return out;
}

Cohort build_cohort(const std::vector<FeatureRecord>& records, std::string_view focal_artist,
                    std::string_view movement, std::string_view genre, std::string_view material,
                    const CohortRules& rules) {
    const auto m = normalize_text(movement);
    return assemble(records, normalize_text(focal_artist), {m}, m, normalize_text(genre),
                    normalize_text(material), rules);
}

Cohort build_pooled_cohort(const std::vector<FeatureRecord>& records,
                           std::string_view focal_artist, const std::vector<std::string>& movements,
                           std::string_view genre, std::string_view material,
                           const CohortRules& rules) {
    std::set<std::string> pooled;
    std::string label;
    for (const auto& m : movements) {
        auto n = normalize_text(m);
        if (pooled.insert(n).second) label += (label.empty() ? "" : "+") + n;
    }
    if (pooled.empty()) throw ValidationError("pooled cohort needs at least one movement");
    return assemble(records, normalize_text(focal_artist), pooled, label, normalize_text(genre),
                    normalize_text(material), rules);
}

void check_cohort(const Cohort& c, const CohortRules& rules) {
    auto fail = [](const std::string& msg) { throw ValidationError("cohort invariant: " + msg); };
    if (c.real.empty()) fail("K must be at least 1");
    if (c.generated.empty()) fail("L must be at least 1");
    if (c.peers.empty()) fail("J must be at least 1");

    const std::size_t dim = c.real.front().features.size();
    auto check_common = [&](const FeatureRecord& r) {
        if (r.genre != c.genre || r.material != c.material) fail("record '" + r.id + "' has another genre or material");
        if (r.features.size() != dim) fail("record '" + r.id + "' has a different dimension");
    };
    for (const auto& r : c.real) {
        check_common(r);
        if (r.provenance != Provenance::real) fail("A_i holds generated record '" + r.id + "'");
        if (r.artist != c.focal_artist) fail("A_i holds record '" + r.id + "' of another artist");
    }
    for (const auto& r : c.generated) {
        check_common(r);
        if (r.provenance != Provenance::generated) fail("G_i holds real record '" + r.id + "'");
        if (r.artist != c.focal_artist) fail("G_i holds record '" + r.id + "' of another artist");
    }
    for (const auto& [artist, recs] : c.peers) {
        if (artist == c.focal_artist) fail("focal artist listed as a peer");
        if (!rules.qualifies(recs.size())) fail("peer '" + artist + "' is below the minimum count");
        for (const auto& r : recs) {
            check_common(r);
            if (r.provenance != Provenance::real) fail("peer set holds generated record '" + r.id + "'");
            if (r.artist != artist) fail("peer set of '" + artist + "' holds record '" + r.id + "'");
        }
    }
    // Movement must match exactly for unpooled cohorts.
    if (c.movement.find('+') == std::string::npos) {
        auto same_movement = [&](const FeatureRecord& r) { return r.movement == c.movement; };
        if (!std::all_of(c.real.begin(), c.real.end(), same_movement)) fail("A_i spans movements");
        for (const auto& [artist, recs] : c.peers) {
            if (!std::all_of(recs.begin(), recs.end(), same_movement)) fail("peer '" + artist + "' spans movements");
        }
    }
}

}  // namespace confound::features
