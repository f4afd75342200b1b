#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "confound/causal_graph.hpp"
#include "confound/discrete_model.hpp"

namespace confound::adjust {

/// Exhaustive sweeps refuse models whose joint state space exceeds 2^22.
inline constexpr double kMaxJointBits = 22.0;

struct CausalEffectReport {
    std::string exposure;
    std::string exposure_value;
    std::string outcome;
    graph::NodeSet adjustment;
    std::vector<std::string> outcome_domain;
    /// P(outcome | do(exposure = exposure_value)), indexed like outcome_domain.
    std::vector<double> distribution;
    std::size_t strata = 0;
    /// Strata with P(exposure_value, stratum) = 0. They contribute nothing and
    /// the remaining strata are renormalized; skipped_mass is their total P(v).
    std::size_t skipped_strata = 0;
    double skipped_mass = 0.0;
};

/// Backdoor adjustment: sum over joint values v of the adjustment set of
/// P(outcome | exposure_value, v) * P(v), both taken from the observational
/// joint implied by the tables. Refuses (DomainError) when the set is not
/// admissible.
CausalEffectReport backdoor_adjust(const DiscreteModel& model, std::string_view exposure,
                                   std::string_view exposure_value, std::string_view outcome,
                                   const graph::NodeSet& adjustment);

/// Ground truth P(outcome | do(exposure = value)): cut the edges into the
/// exposure, clamp it, and sum the full joint over every assignment.
std::vector<double> intervention_oracle(const DiscreteModel& model, std::string_view exposure,
                                        std::string_view exposure_value, std::string_view outcome);

/// Unadjusted P(outcome | exposure = value).
std::vector<double> observational_conditional(const DiscreteModel& model, std::string_view exposure,
                                              std::string_view exposure_value,
                                              std::string_view outcome);

}  // namespace confound::adjust
