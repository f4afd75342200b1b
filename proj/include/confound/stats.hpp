#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace confound::stats {

/// Exact p-values below these effective sample sizes, normal approximation
/// (tie and continuity corrected) above.
inline constexpr std::size_t kExactSignedRankLimit = 25;
inline constexpr std::size_t kExactRankSumLimit = 20;

enum class TestKind { signed_rank, rank_sum };
enum class Method { exact, normal_approximation };

std::string_view to_string(TestKind kind);
std::string_view to_string(Method method);

/// Shared result shape for both rank tests.
///
/// signed_rank: n_effective counts nonzero differences; rank_plus/rank_minus
///              are W+ and W- (midranks for tied magnitudes).
/// rank_sum:    n_effective = n_a + n_b; rank_plus/rank_minus are U_a and U_b.
///
/// statistic = min(rank_plus, rank_minus). p-values are two-sided.
struct RankTestResult {
    TestKind test = TestKind::signed_rank;
    std::size_t n_effective = 0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::size_t zero_differences = 0;
    double rank_plus = 0.0;
    double rank_minus = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    Method method = Method::exact;
    double alpha = 0.05;
    bool reject = false;
};

struct PairedSample {
    std::vector<std::pair<double, double>> pairs;
};

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
std::vector<double> midranks(std::span<const double> values);

/// Wilcoxon signed-rank test on a - b. Zero differences are dropped. With at
/// most kExactSignedRankLimit nonzero differences the p-value is the exact
/// sign-flip distribution. Throws DomainError if every difference is zero.
RankTestResult wilcoxon_signed_rank(const PairedSample& sample, double alpha);
RankTestResult wilcoxon_signed_rank_differences(std::span<const double> differences, double alpha);

/// Mann-Whitney U (Wilcoxon rank-sum). Exact over all group assignments when
/// n_a + n_b <= kExactRankSumLimit.
RankTestResult rank_sum_test(std::span<const double> group_a, std::span<const double> group_b,
                             double alpha);

enum class GroupMode { paired, unpaired };

std::string_view to_string(GroupMode mode);
GroupMode parse_group_mode(std::string_view name);

struct GroupComparison {
    GroupMode mode = GroupMode::unpaired;
    std::size_t n_single = 0;
    std::size_t n_multi = 0;
    double mean_single = 0.0;  // M_s
    double mean_multi = 0.0;   // M_m
    RankTestResult test;
};

/// Tests H0: M_s = M_m against the two-sided alternative. Paired mode pairs
/// scores by position and needs equal lengths.
GroupComparison compare_movement_groups(std::span<const double> single_movement,
                                        std::span<const double> multi_movement, double alpha,
                                        GroupMode mode);

}  // namespace confound::stats
