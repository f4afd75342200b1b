#include "confound/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <iostream>
#include <sstream>

#include "confound/adjustment.hpp"
#include "confound/dag_dsl.hpp"
#include "confound/error.hpp"
#include "confound/report_json.hpp"

namespace confound::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
    }
    return out;
}

graph::NodeSet to_set(const std::string& text) {
    const auto items = split_list(text);
    return {items.begin(), items.end()};
}

std::string one_line(std::string msg) {
    for (auto& c : msg) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return msg;
}

bool parse_number(std::string_view text, double& value) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

// Rows of a numeric CSV with `columns` columns. A first line that does not
// parse as numbers is taken as a header.
std::vector<std::vector<double>> read_csv(const std::string& path, std::size_t columns) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        bool numeric = true;
        while (std::getline(fields, field, ',')) {
            double v = 0.0;
            if (!parse_number(field, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw ParseError("expected " + std::to_string(columns) + " numeric column(s) in '" + path + "'", line_no);
        }
        first = false;
        if (row.size() != columns) {
            throw ParseError("expected " + std::to_string(columns) + " column(s), found " +
                                 std::to_string(row.size()) + " in '" + path + "'",
                             line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> read_column(const std::string& path) {
    std::vector<double> out;
    for (const auto& row : read_csv(path, 1)) out.push_back(row[0]);
    return out;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("CONFOUND_QUANT_SEED");
    if (!env || !*env) return 1;
    std::uint64_t seed = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw CLI::ValidationError("CONFOUND_QUANT_SEED", "not an unsigned integer: '" + std::string(text) + "'");
    }
    return seed;
}

// Options shared by the bias subcommands.
struct CohortFlags {
    std::string data, artist, genre, material, distance = "euclidean";
    std::size_t min_peer_count = 35;
    bool strict = false;

    void add(CLI::App* app) {
        app->add_option("--data", data, "Feature records (JSON Lines)")->required()->check(CLI::ExistingFile);
        app->add_option("--artist", artist, "Focal artist")->required();
        app->add_option("--genre", genre, "Genre")->required();
        app->add_option("--material", material, "Material")->required();
        app->add_option("--distance", distance, "euclidean, manhattan, chebyshev or wasserstein-1d")
            ->capture_default_str();
        app->add_option("--min-peer-count", min_peer_count, "Minimum works per peer artist")->capture_default_str();
        app->add_flag("--strict-peers", strict, "Require more than --min-peer-count works per peer");
    }
    features::CohortRules rules() const { return {min_peer_count, strict}; }
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(const std::vector<std::string>& args) {
        CLI::App app{"Quantify confounding bias in generative art", "confound-quant"};
        app.set_version_flag("--version", version());
        app.require_subcommand(1);
        app.add_flag("--verbose", verbose_, "Print a human-readable summary to stderr");
        app.add_option("--out", out_path_, "Write the report to this file instead of stdout");
        register_dag(app);
        register_adjust(app);
        register_data(app);
        register_bias(app);
        register_stats(app);
        register_synth(app);

        std::vector<const char*> argv{"confound-quant"};
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::CallForVersion&) {
            out_ << version() << "\n";
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << one_line(e.what()) << "\n";
            return kExitUsage;
        }
        // A subcommand's --help is raised by the subcommand and caught above;
        // here exactly one leaf action is pending.
        if (!action_) {
            err_ << "error: missing subcommand\n";
            return kExitUsage;
        }
        try {
            action_();
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << one_line(e.what()) << "\n";
            return kExitUsage;
        } catch (const ParseError& e) {
            err_ << "error: " << one_line(e.what()) << "\n";
            return kExitUsage;
        } catch (const std::exception& e) {
            err_ << "error: " << one_line(e.what()) << "\n";
            return kExitDomain;
        }
    }

private:
    void emit(json report) {
        json doc{{"version", version()}};
        doc.update(report);
        const std::string text = doc.dump(2) + "\n";
        if (out_path_.empty()) {
            out_ << text;
            return;
        }
        std::ofstream f(out_path_, std::ios::binary);
        if (!f) throw Error("cannot write '" + out_path_ + "'");
        f << text;
    }

    void note(const std::string& line) {
        if (verbose_) err_ << line << "\n";
    }

    CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help,
                   std::function<void()> action) {
        auto* sub = parent->add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([this, action = std::move(action)] { action_ = action; });
        return sub;
    }

    static CLI::App* group(CLI::App& app, const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->require_subcommand(1);
        sub->fallthrough();
        return sub;
    }

    void register_dag(CLI::App& app) {
        auto* dag = group(app, "dag", "Causal graph queries");

        auto* validate = leaf(dag, "validate", "Check a DAG file and print it as JSON", [this] {
            const auto g = graph::load_dag(dag_file_);
            note("dag '" + g.name() + "': " + std::to_string(g.size()) + " nodes, " +
                 std::to_string(g.edges().size()) + " edges, acyclic");
            emit({{"valid", true}, {"dag", g}});
        });
        validate->add_option("file", dag_file_, "DAG file")->required()->check(CLI::ExistingFile);

        auto* dsep = leaf(dag, "dsep", "Test d-separation of two node sets", [this] {
            const auto g = graph::load_dag(dag_file_);
            const graph::SeparationQuery q{to_set(x_), to_set(z_), to_set(given_)};
            const bool sep = graph::is_d_separated(g, q);
            note(std::string(sep ? "d-separated" : "d-connected"));
            emit({{"x", q.x}, {"z", q.z}, {"given", q.given}, {"d_separated", sep}});
        });
        dsep->add_option("file", dag_file_, "DAG file")->required()->check(CLI::ExistingFile);
        dsep->add_option("--x", x_, "Comma-separated node ids")->required();
        dsep->add_option("--z", z_, "Comma-separated node ids")->required();
        dsep->add_option("--given", given_, "Comma-separated conditioning set");

        auto* sets = leaf(dag, "adjustment-sets", "List minimal admissible adjustment sets", [this] {
            const auto g = graph::load_dag(dag_file_);
            const auto found = graph::minimal_adjustment_sets(g, exposure_, outcome_);
            json list = json::array();
            for (const auto& s : found) list.push_back(s);
            json report{{"exposure", exposure_}, {"outcome", outcome_}, {"adjustment_sets", list},
                        {"identifiable", !found.empty()}};
            if (!candidate_.empty()) {
                report["candidate"] = {{"set", to_set(candidate_)},
                                       {"result", graph::is_admissible(g, exposure_, outcome_, to_set(candidate_))}};
            }
            if (found.empty()) err_ << "warning: not identifiable via backdoor\n";
            note(std::to_string(found.size()) + " minimal adjustment set(s)");
            emit(report);
        });
        sets->add_option("file", dag_file_, "DAG file")->required()->check(CLI::ExistingFile);
        sets->add_option("--exposure", exposure_, "Exposure node")->required();
        sets->add_option("--outcome", outcome_, "Outcome node")->required();
        sets->add_option("--candidate", candidate_, "Also check this comma-separated set");
    }

    void register_adjust(CLI::App& app) {
        auto* adjust = group(app, "adjust", "Backdoor adjustment on discrete models");
        auto* compute = leaf(adjust, "compute", "Compute P(outcome | do(exposure = value))", [this] {
            auto model = adjust::load_model(model_file_, graph::load_dag(dag_file_));
            const auto r = adjust::backdoor_adjust(model, exposure_, value_, outcome_, to_set(set_));
            json report = r;
            json observed = json::object();
            const auto obs = adjust::observational_conditional(model, exposure_, value_, outcome_);
            for (std::size_t i = 0; i < obs.size(); ++i) observed[r.outcome_domain[i]] = obs[i];
            report["observational"] = observed;
            if (oracle_) {
                const auto truth = adjust::intervention_oracle(model, exposure_, value_, outcome_);
                json t = json::object();
                double worst = 0.0;
                for (std::size_t i = 0; i < truth.size(); ++i) {
                    t[r.outcome_domain[i]] = truth[i];
                    worst = std::max(worst, std::abs(truth[i] - r.distribution[i]));
                }
                report["oracle"] = t;
                report["max_abs_error"] = worst;
            }
            note("adjusted over " + std::to_string(r.strata) + " strata (" + std::to_string(r.skipped_strata) +
                 " skipped)");
            emit(report);
        });
        compute->add_option("dag", dag_file_, "DAG file")->required()->check(CLI::ExistingFile);
        compute->add_option("model", model_file_, "Discrete model file")->required()->check(CLI::ExistingFile);
        compute->add_option("--exposure", exposure_, "Exposure node")->required();
        compute->add_option("--value", value_, "Exposure value")->required();
        compute->add_option("--outcome", outcome_, "Outcome node")->required();
        compute->add_option("--set", set_, "Comma-separated adjustment set");
        compute->add_flag("--oracle", oracle_, "Also compute the ground truth by intervention");
    }

    void register_data(CLI::App& app) {
        auto* data = group(app, "data", "Feature record files");
        auto* validate = leaf(data, "validate", "Validate a JSON Lines feature file", [this] {
            const auto ds = features::load_records(data_file_);
            note(std::to_string(ds.records.size()) + " records, dimension " + std::to_string(ds.summary.dimension));
            emit({{"valid", true},
                  {"record_count", ds.summary.record_count},
                  {"dimension", ds.summary.dimension},
                  {"header", ds.header}});
        });
        validate->add_option("file", data_file_, "Feature file")->required()->check(CLI::ExistingFile);

        auto* summary = leaf(data, "summary", "Count records per artist, movement, genre, material and provenance", [this] {
            const auto ds = features::load_records(data_file_);
            note(std::to_string(ds.summary.counts.size()) + " groups");
            emit({{"summary", ds.summary}});
        });
        summary->add_option("file", data_file_, "Feature file")->required()->check(CLI::ExistingFile);
    }

    void register_bias(CLI::App& app) {
        auto* bias = group(app, "bias", "Confounding-bias scores");

        auto* compute = leaf(bias, "compute", "Score one cohort", [this] {
            const auto ds = features::load_records(cohort_.data);
            const auto kind = matching::parse_distance_kind(cohort_.distance);
            const auto cohort = features::build_cohort(ds.records, cohort_.artist, movement_, cohort_.genre,
                                                       cohort_.material, cohort_.rules());
            const auto r = matching::compute_bias(cohort, kind);
            std::ostringstream s;
            s << "bias " << r.bias << " (numerator " << r.numerator << ", denominator " << r.denominator << ")";
            note(s.str());
            emit(r);
        });
        cohort_.add(compute);
        compute->add_option("--movement", movement_, "Art movement")->required();

        auto* simpson = leaf(bias, "simpson", "Compare per-movement scores with the pooled score", [this] {
            const auto ds = features::load_records(cohort_.data);
            const auto kind = matching::parse_distance_kind(cohort_.distance);
            const auto r = matching::simpson_check(ds.records, cohort_.artist, cohort_.genre, cohort_.material,
                                                   split_list(movements_), kind, cohort_.rules());
            std::ostringstream s;
            s << "pooled " << r.pooled.bias << (r.attenuated ? " below" : " not below") << " every stratum";
            note(s.str());
            emit(r);
        });
        cohort_.add(simpson);
        simpson->add_option("--movements", movements_, "Comma-separated movements")->required();
    }

    void register_stats(CLI::App& app) {
        auto* stats = group(app, "stats", "Rank tests");

        auto* wilcoxon = leaf(stats, "wilcoxon", "Wilcoxon signed-rank test on paired scores", [this] {
            stats::PairedSample sample;
            for (const auto& row : read_csv(pairs_file_, 2)) sample.pairs.emplace_back(row[0], row[1]);
            const auto r = stats::wilcoxon_signed_rank(sample, alpha_);
            note("p = " + std::to_string(r.p_value));
            emit(r);
        });
        wilcoxon->add_option("--pairs", pairs_file_, "CSV with header a,b")->required()->check(CLI::ExistingFile);
        wilcoxon->add_option("--alpha", alpha_, "Significance level")->capture_default_str();

        auto* ranksum = leaf(stats, "ranksum", "Mann-Whitney rank-sum test on two groups", [this] {
            const auto a = read_column(a_file_), b = read_column(b_file_);
            const auto r = stats::rank_sum_test(a, b, alpha_);
            note("p = " + std::to_string(r.p_value));
            emit(r);
        });
        ranksum->add_option("--a", a_file_, "One-column file")->required()->check(CLI::ExistingFile);
        ranksum->add_option("--b", b_file_, "One-column file")->required()->check(CLI::ExistingFile);
        ranksum->add_option("--alpha", alpha_, "Significance level")->capture_default_str();

        auto* compare = leaf(stats, "compare", "Compare single- and multi-movement artists' scores", [this] {
            const auto single = read_column(a_file_), multi = read_column(b_file_);
            const auto c = stats::compare_movement_groups(single, multi, alpha_, stats::parse_group_mode(group_mode_));
            note("p = " + std::to_string(c.test.p_value));
            emit(c);
        });
        compare->add_option("--single", a_file_, "Scores of single-movement artists")->required()->check(CLI::ExistingFile);
        compare->add_option("--multi", b_file_, "Scores of multi-movement artists")->required()->check(CLI::ExistingFile);
        compare->add_option("--mode", group_mode_, "paired or unpaired")->capture_default_str();
        compare->add_option("--alpha", alpha_, "Significance level")->capture_default_str();
    }

    void add_synth_options(CLI::App* sub) {
        sub->add_option("--preset", preset_, "Named preset")->capture_default_str();
        sub->add_option("--config", config_file_, "JSON file mirroring SynthConfig")->check(CLI::ExistingFile);
        sub->add_option("--mode", mode_, "aware or blind")->capture_default_str();
        sub->add_option("--seed", seed_, "Seed (default: CONFOUND_QUANT_SEED or 1)");
        sub->add_option("--separation", preset_options_.separation, "Distance between movement centroids")
            ->capture_default_str();
        sub->add_option("--spread", preset_options_.spread, "Within-movement spread")->capture_default_str();
        sub->add_option("--dimension", preset_options_.dimension, "Feature dimension")->capture_default_str();
    }

    synth::SynthConfig resolve_config() {
        const auto seed = seed_ ? *seed_ : default_seed();
        if (config_file_.empty()) {
            return synth::preset_config(preset_, seed, synth::parse_generator_mode(mode_), preset_options_);
        }
        auto in = open_input(config_file_);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("config: ") + e.what(), 0);
        }
        auto cfg = synth::config_from_json(doc);
        if (seed_ || std::getenv("CONFOUND_QUANT_SEED")) cfg.seed = seed;
        return cfg;
    }

    void register_synth(CLI::App& app) {
        auto* synth_cmd = group(app, "synth", "Synthetic datasets and scenarios");

        auto* generate = leaf(synth_cmd, "generate", "Write a synthetic feature file", [this] {
            const auto cfg = resolve_config();
            const auto records = synth::generate_dataset(cfg);
            json header{{"producer", "confound-quant synth"},
                        {"version", version()},
                        {"preset", config_file_.empty() ? preset_ : "config"},
                        {"seed", cfg.seed},
                        {"mode", std::string(synth::to_string(cfg.mode))},
                        {"dimension", cfg.dimension}};
            std::ostringstream text;
            text << json{{"header", header}}.dump() << "\n";
            features::write_records(text, records);
            note(std::to_string(records.size()) + " records");
            if (out_path_.empty()) {
                out_ << text.str();
            } else {
                std::ofstream f(out_path_, std::ios::binary);
                if (!f) throw Error("cannot write '" + out_path_ + "'");
                f << text.str();
            }
        });
        add_synth_options(generate);

        auto* scenario = leaf(synth_cmd, "scenario", "Generate, score every focal artist and compare groups", [this] {
            const auto cfg = resolve_config();
            const auto r = synth::run_scenario(cfg, config_file_.empty() ? preset_ : "config",
                                               matching::parse_distance_kind(distance_), alpha_,
                                               stats::parse_group_mode(group_mode_));
            std::string order;
            for (const auto& a : r.ordering) order += (order.empty() ? "" : " > ") + a;
            note("ordering: " + order);
            emit(r);
        });
        add_synth_options(scenario);
        scenario->add_option("--distance", distance_, "Distance function")->capture_default_str();
        scenario->add_option("--alpha", alpha_, "Significance level")->capture_default_str();
        scenario->add_option("--group-mode", group_mode_, "paired or unpaired")->capture_default_str();
    }

    std::ostream& out_;
    std::ostream& err_;
    std::function<void()> action_;
    bool verbose_ = false;
    std::string out_path_;

    std::string dag_file_, model_file_, data_file_;
    std::string x_, z_, given_, exposure_, outcome_, candidate_, value_, set_;
    bool oracle_ = false;
    CohortFlags cohort_;
    std::string movement_, movements_;
    std::string pairs_file_, a_file_, b_file_;
    double alpha_ = 0.05;
    std::string group_mode_ = "unpaired";
    std::string preset_ = "paper-shape", config_file_, mode_ = "blind", distance_ = "euclidean";
    std::optional<std::uint64_t> seed_;
    synth::PresetOptions preset_options_;
};

}  // namespace

const char* version() { return CONFOUND_VERSION; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Runner(out, err).run(args);
}

}  // namespace confound::cli
