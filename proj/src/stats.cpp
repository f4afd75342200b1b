#include "confound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "confound/error.hpp"

namespace confound::stats {

namespace {

// Ranks doubled so midranks stay integral.
std::vector<std::uint64_t> doubled_midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::uint64_t> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share rank ((i+1)+(j+1))/2
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = i + j + 2;
        i = j + 1;
    }
    return ranks;
}

// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        term += t * t * t - t;
        i = j + 1;
    }
    return term;
}

// Two-sided p from tail counts over `total` equally likely outcomes; the
// rational is converted to floating point exactly once.
double two_sided_exact(std::uint64_t lower, std::uint64_t upper, std::uint64_t total) {
    const std::uint64_t num = 2 * std::min(lower, upper);
    if (num >= total) return 1.0;
    return static_cast<double>(num) / static_cast<double>(total);
}

double two_sided_normal(double deviation, double variance) {
    if (variance <= 0.0) return 1.0;
    const double z = (std::abs(deviation) - 0.5) / std::sqrt(variance);
    if (z <= 0.0) return 1.0;
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
}

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError(std::string(what) + " contains a non-finite value");
    }
}

}  // namespace

std::string_view to_string(TestKind kind) {
    return kind == TestKind::signed_rank ? "wilcoxon-signed-rank" : "mann-whitney-rank-sum";
}

std::string_view to_string(Method method) {
    return method == Method::exact ? "exact" : "normal-approximation";
}

std::string_view to_string(GroupMode mode) { return mode == GroupMode::paired ? "paired" : "unpaired"; }

GroupMode parse_group_mode(std::string_view name) {
    if (name == "paired") return GroupMode::paired;
    if (name == "unpaired") return GroupMode::unpaired;
    throw ValidationError("unknown mode '" + std::string(name) + "' (expected paired or unpaired)");
}

std::vector<double> midranks(std::span<const double> values) {
    const auto doubled = doubled_midranks(values);
    std::vector<double> out(doubled.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(doubled[i]) / 2.0;
    return out;
}

RankTestResult wilcoxon_signed_rank_differences(std::span<const double> differences, double alpha) {
    check_alpha(alpha);
    if (differences.empty()) throw ValidationError("signed-rank test needs at least one pair");
    check_finite(differences, "sample");

    RankTestResult r;
    r.test = TestKind::signed_rank;
    r.alpha = alpha;
    std::vector<double> magnitude;
    std::vector<bool> positive;
    for (double d : differences) {
        if (d == 0.0) {
            ++r.zero_differences;
            continue;
        }
        magnitude.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    const std::size_t n = magnitude.size();
    if (n == 0) throw DomainError("all differences are zero; the signed-rank test is undefined");
    r.n_effective = n;
    r.n_a = r.n_b = differences.size();

    const auto ranks = doubled_midranks(magnitude);
    std::uint64_t plus2 = 0, total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += ranks[i];
        if (positive[i]) plus2 += ranks[i];
    }
    r.rank_plus = static_cast<double>(plus2) / 2.0;
    r.rank_minus = static_cast<double>(total2 - plus2) / 2.0;
    r.statistic = std::min(r.rank_plus, r.rank_minus);

    if (n <= kExactSignedRankLimit) {
        r.method = Method::exact;
        // counts[s] = number of sign assignments whose doubled W+ equals s
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (std::uint64_t rank : ranks) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s]) counts[s + rank] += counts[s];
            }
            reach += rank;
        }
        std::uint64_t lower = 0, upper = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (s <= plus2) lower += counts[s];
            if (s >= plus2) upper += counts[s];
        }
        r.p_value = two_sided_exact(lower, upper, std::uint64_t{1} << n);
    } else {
        r.method = Method::normal_approximation;
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(magnitude) / 48.0;
        r.p_value = two_sided_normal(r.rank_plus - mean, variance);
    }
    r.reject = r.p_value < alpha;
    return r;
}

RankTestResult wilcoxon_signed_rank(const PairedSample& sample, double alpha) {
    std::vector<double> diffs;
    diffs.reserve(sample.pairs.size());
    for (const auto& [a, b] : sample.pairs) diffs.push_back(a - b);
    return wilcoxon_signed_rank_differences(diffs, alpha);
}

RankTestResult rank_sum_test(std::span<const double> group_a, std::span<const double> group_b,
                             double alpha) {
    check_alpha(alpha);
    if (group_a.empty() || group_b.empty()) throw ValidationError("rank-sum test needs two nonempty groups");
    check_finite(group_a, "group a");
    check_finite(group_b, "group b");

    const std::size_t na = group_a.size(), nb = group_b.size(), n = na + nb;
    std::vector<double> combined(group_a.begin(), group_a.end());
    combined.insert(combined.end(), group_b.begin(), group_b.end());
    const auto ranks = doubled_midranks(combined);

    std::uint64_t ra2 = 0, total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += ranks[i];
        if (i < na) ra2 += ranks[i];
    }

    RankTestResult r;
    r.test = TestKind::rank_sum;
    r.alpha = alpha;
    r.n_effective = n;
    r.n_a = na;
    r.n_b = nb;
    const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);
    r.rank_plus = static_cast<double>(ra2) / 2.0 - dna * (dna + 1.0) / 2.0;
    r.rank_minus = dna * dnb - r.rank_plus;
    r.statistic = std::min(r.rank_plus, r.rank_minus);

    if (n <= kExactRankSumLimit) {
        r.method = Method::exact;
        // ways[k][s]: subsets of size k with doubled rank sum s
        std::vector<std::vector<std::uint64_t>> ways(na + 1, std::vector<std::uint64_t>(total2 + 1, 0));
        ways[0][0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t top = std::min(i + 1, na);
            for (std::size_t k = top; k >= 1; --k) {
                for (std::uint64_t s = total2 + 1; s-- > ranks[i];) {
                    ways[k][s] += ways[k - 1][s - ranks[i]];
                }
            }
        }
        std::uint64_t lower = 0, upper = 0, all = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            const std::uint64_t c = ways[na][s];
            all += c;
            if (s <= ra2) lower += c;
            if (s >= ra2) upper += c;
        }
        r.p_value = two_sided_exact(lower, upper, all);
    } else {
        r.method = Method::normal_approximation;
        const double nn = static_cast<double>(n);
        const double variance = dna * dnb / 12.0 * ((nn + 1.0) - tie_term(combined) / (nn * (nn - 1.0)));
        r.p_value = two_sided_normal(r.rank_plus - dna * dnb / 2.0, variance);
    }
    r.reject = r.p_value < alpha;
    return r;
}

GroupComparison compare_movement_groups(std::span<const double> single_movement,
                                        std::span<const double> multi_movement, double alpha,
                                        GroupMode mode) {
    GroupComparison out;
    out.mode = mode;
    out.n_single = single_movement.size();
    out.n_multi = multi_movement.size();
    if (single_movement.empty() || multi_movement.empty()) {
        throw ValidationError("both movement groups need at least one score");
    }
    auto mean = [](std::span<const double> v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.mean_single = mean(single_movement);
    out.mean_multi = mean(multi_movement);

    if (mode == GroupMode::paired) {
        if (single_movement.size() != multi_movement.size()) {
            throw ValidationError("paired mode needs equal group sizes (" +
                                  std::to_string(single_movement.size()) + " vs " +
                                  std::to_string(multi_movement.size()) + ")");
        }
        PairedSample sample;
        for (std::size_t i = 0; i < single_movement.size(); ++i) {
            sample.pairs.emplace_back(single_movement[i], multi_movement[i]);
        }
        out.test = wilcoxon_signed_rank(sample, alpha);
    } else {
        out.test = rank_sum_test(single_movement, multi_movement, alpha);
    }
    return out;
}

}  // namespace confound::stats
