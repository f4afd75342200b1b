#include "confound/adjustment.hpp"

#include <algorithm>
#include <cmath>

#include "confound/error.hpp"

namespace confound::adjust {

namespace {

// Index-based view of a validated model.
class CompiledModel {
public:
    explicit CompiledModel(const DiscreteModel& model) : model_(model) {
        require_valid(model);
        const auto& dag = model.dag;
        const std::size_t n = dag.size();
        card_.resize(n);
        parents_.resize(n);
        tables_.resize(n);
        for (std::size_t i = 0; i < n; ++i) card_[i] = model.domains.at(dag.node(i).id).size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& table = model.cpts.at(dag.node(i).id);
            std::size_t rows = 1;
            for (const auto& p : table.parents) {
                parents_[i].push_back(dag.index_of(p));
                rows *= card_[parents_[i].back()];
            }
            tables_[i].assign(rows * card_[i], 0.0);
            for (const auto& [key, probs] : table.rows) {
                std::size_t row = 0;
                for (std::size_t k = 0; k < key.size(); ++k) {
                    const std::size_t p = parents_[i][k];
                    row = row * card_[p] + category(p, key[k]);
                }
                std::copy(probs.begin(), probs.end(), tables_[i].begin() + row * card_[i]);
            }
        }
    }

    std::size_t size() const { return card_.size(); }
    std::size_t card(std::size_t node) const { return card_[node]; }

    std::size_t category(std::size_t node, std::string_view label) const {
        const auto& dom = model_.domains.at(model_.dag.node(node).id);
        auto it = std::find(dom.begin(), dom.end(), label);
        if (it == dom.end()) {
            throw ValidationError("'" + std::string(label) + "' is not a category of node '" +
                                  model_.dag.node(node).id + "'");
        }
        return static_cast<std::size_t>(it - dom.begin());
    }

    /// P(node = assignment[node] | its parents as assigned).
    double factor(std::size_t node, const std::vector<std::size_t>& assignment) const {
        std::size_t row = 0;
        for (std::size_t p : parents_[node]) row = row * card_[p] + assignment[p];
        return tables_[node][row * card_[node] + assignment[node]];
    }

    void check_size(const std::vector<std::size_t>& nodes) const {
        double bits = 0.0;
        for (std::size_t v : nodes) bits += std::log2(static_cast<double>(card_[v]));
        if (bits > kMaxJointBits + 1e-9) {
            throw DomainError("model too large for exhaustive evaluation (" + std::to_string(bits) +
                              " bits > " + std::to_string(static_cast<int>(kMaxJointBits)) + ")");
        }
    }

    /// Calls f(assignment) for every joint value of `nodes`; other entries of
    /// the assignment keep whatever `assignment` held on entry.
    template <typename F>
    void sweep(const std::vector<std::size_t>& nodes, std::vector<std::size_t>& assignment, F&& f) const {
        for (std::size_t v : nodes) assignment[v] = 0;
        while (true) {
            f(assignment);
            std::size_t k = nodes.size();
            while (k > 0) {
                const std::size_t v = nodes[k - 1];
                if (++assignment[v] < card_[v]) break;
                assignment[v] = 0;
                --k;
            }
            if (k == 0) return;
        }
    }

private:
    const DiscreteModel& model_;
    std::vector<std::size_t> card_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<double>> tables_;
};

// Nodes whose tables matter for a marginal over `targets`: the targets and
// their ancestors. Everything else sums out to one.
std::vector<std::size_t> ancestral_closure(const graph::CausalDag& dag,
                                           const std::vector<std::string>& targets) {
    std::vector<bool> keep(dag.size(), false);
    for (const auto& t : targets) {
        keep[dag.index_of(t)] = true;
        for (const auto& a : graph::ancestors(dag, t)) keep[dag.index_of(a)] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dag.size(); ++i) {
        if (keep[i]) out.push_back(i);
    }
    return out;
}

void check_query(const DiscreteModel& model, std::string_view exposure, std::string_view outcome) {
    (void)model.dag.index_of(exposure);
    (void)model.dag.index_of(outcome);
    if (exposure == outcome) throw ValidationError("exposure and outcome must differ");
}

}  // namespace

CausalEffectReport backdoor_adjust(const DiscreteModel& model, std::string_view exposure,
                                   std::string_view exposure_value, std::string_view outcome,
                                   const graph::NodeSet& adjustment) {
    check_query(model, exposure, outcome);
    const CompiledModel compiled(model);
    const auto& dag = model.dag;

    const auto check = graph::is_admissible(dag, exposure, outcome, adjustment);
    if (!check.admissible) {
        std::string why(graph::to_string(check.violated));
        if (check.witness) why += " via " + check.witness->render();
        for (const auto& id : check.offending) why += " (" + id + " descends from " + std::string(exposure) + ")";
        throw DomainError("inadmissible adjustment set: " + why);
    }

    const std::size_t x = dag.index_of(exposure);
    const std::size_t z = dag.index_of(outcome);
    const std::size_t x_value = compiled.category(x, exposure_value);

    std::vector<std::size_t> strata_nodes;
    std::size_t strata = 1;
    for (const auto& id : adjustment) {
        strata_nodes.push_back(dag.index_of(id));
        strata *= compiled.card(strata_nodes.back());
    }

    std::vector<std::string> targets(adjustment.begin(), adjustment.end());
    targets.emplace_back(exposure);
    targets.emplace_back(outcome);
    const auto relevant = ancestral_closure(dag, targets);
    compiled.check_size(relevant);

    const std::size_t cx = compiled.card(x), cz = compiled.card(z);
    // joint[(stratum * cx + x) * cz + z] = P(v, x, z)
    std::vector<double> joint(strata * cx * cz, 0.0);
    std::vector<std::size_t> assignment(dag.size(), 0);
    compiled.sweep(relevant, assignment, [&](const std::vector<std::size_t>& a) {
        double p = 1.0;
        for (std::size_t v : relevant) p *= compiled.factor(v, a);
        std::size_t s = 0;
        for (std::size_t v : strata_nodes) s = s * compiled.card(v) + a[v];
        joint[(s * cx + a[x]) * cz + a[z]] += p;
    });

    CausalEffectReport report;
    report.exposure = std::string(exposure);
    report.exposure_value = std::string(exposure_value);
    report.outcome = std::string(outcome);
    report.adjustment = adjustment;
    report.outcome_domain = model.domains.at(report.outcome);
    report.distribution.assign(cz, 0.0);
    report.strata = strata;

    double used_mass = 0.0;
    for (std::size_t s = 0; s < strata; ++s) {
        double p_stratum = 0.0;
        for (std::size_t xi = 0; xi < cx; ++xi) {
            for (std::size_t zi = 0; zi < cz; ++zi) p_stratum += joint[(s * cx + xi) * cz + zi];
        }
        double p_x_stratum = 0.0;
        for (std::size_t zi = 0; zi < cz; ++zi) p_x_stratum += joint[(s * cx + x_value) * cz + zi];
        if (p_x_stratum == 0.0) {
            ++report.skipped_strata;
            report.skipped_mass += p_stratum;
            continue;
        }
        used_mass += p_stratum;
        for (std::size_t zi = 0; zi < cz; ++zi) {
            report.distribution[zi] += joint[(s * cx + x_value) * cz + zi] / p_x_stratum * p_stratum;
        }
    }
    if (used_mass == 0.0) {
        throw DomainError("exposure value '" + report.exposure_value +
                          "' has zero probability in every stratum");
    }
    if (report.skipped_strata > 0) {
        for (double& p : report.distribution) p /= used_mass;
    }
    return report;
}

std::vector<double> intervention_oracle(const DiscreteModel& model, std::string_view exposure,
                                        std::string_view exposure_value, std::string_view outcome) {
    check_query(model, exposure, outcome);
    const CompiledModel compiled(model);
    const auto& dag = model.dag;
    const std::size_t x = dag.index_of(exposure);
    const std::size_t z = dag.index_of(outcome);

    std::vector<std::size_t> all(dag.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    compiled.check_size(all);

    std::vector<std::size_t> free;
    for (std::size_t i : all) {
        if (i != x) free.push_back(i);
    }
    std::vector<std::size_t> assignment(dag.size(), 0);
    assignment[x] = compiled.category(x, exposure_value);

    std::vector<double> out(compiled.card(z), 0.0);
    compiled.sweep(free, assignment, [&](const std::vector<std::size_t>& a) {
        double p = 1.0;
        for (std::size_t v : free) p *= compiled.factor(v, a);
        out[a[z]] += p;
    });
    return out;
}

std::vector<double> observational_conditional(const DiscreteModel& model, std::string_view exposure,
                                              std::string_view exposure_value,
                                              std::string_view outcome) {
    check_query(model, exposure, outcome);
    const CompiledModel compiled(model);
    const auto& dag = model.dag;
    const std::size_t x = dag.index_of(exposure);
    const std::size_t z = dag.index_of(outcome);
    const std::size_t x_value = compiled.category(x, exposure_value);

    const auto relevant = ancestral_closure(dag, {std::string(exposure), std::string(outcome)});
    compiled.check_size(relevant);
    std::vector<double> out(compiled.card(z), 0.0);
    std::vector<std::size_t> assignment(dag.size(), 0);
    compiled.sweep(relevant, assignment, [&](const std::vector<std::size_t>& a) {
        if (a[x] != x_value) return;
        double p = 1.0;
        for (std::size_t v : relevant) p *= compiled.factor(v, a);
        out[a[z]] += p;
    });
    double total = 0.0;
    for (double p : out) total += p;
    if (total == 0.0) {
        throw DomainError("exposure value '" + std::string(exposure_value) + "' has zero probability");
    }
    for (double& p : out) p /= total;
    return out;
}

}  // namespace confound::adjust
