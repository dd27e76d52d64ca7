#pragma once

// Sequential information-based algorithms over function classes.
//
// A strategy is the triple (node chooser, stopping rule, estimator): node k
// may depend only on the first k-1 answers and the randomness handle, the
// stopping rule sees the input's tag and the randomness, and the estimator
// maps the observed answers to a real number.  Deterministic strategies
// ignore the randomness handle.  Inputs are black-box oracles from points
// to answer values; for the fooling families the answers are derivative
// towers truncated at order one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hardquad/rng.hpp"

namespace hardquad {

inline constexpr std::size_t kDefaultQueryBudgetCap = 1'000'000;

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Point, class Answer>
struct QueryableInput {
    std::string tag;
    std::function<Answer(const Point&)> query;
};

template <class Point, class Answer>
struct Strategy {
    std::function<Point(std::span<const Answer>, std::uint64_t)> next_node;
    std::function<std::size_t(std::string_view, std::uint64_t)> stop_rule;
    std::function<double(std::span<const Answer>, std::uint64_t)> estimator;
    bool deterministic = true;
};

template <class Point, class Answer>
struct Trace {
    std::vector<Point> nodes;
    std::vector<Answer> answers;
    std::size_t count() const { return nodes.size(); }
};

template <class Point, class Answer>
struct RunResult {
    double estimate = 0.0;
    Trace<Point, Answer> trace;
};

// Executes the sequential loop: query at next_node(prefix), append the
// answer, stop after stop_rule(tag) evaluations, then apply the estimator.
template <class Point, class Answer>
RunResult<Point, Answer> run_strategy(const QueryableInput<Point, Answer>& g,
                                      const Strategy<Point, Answer>& s, std::uint64_t omega = 0,
                                      std::size_t budget_cap = kDefaultQueryBudgetCap) {
    const std::size_t budget = s.stop_rule(g.tag, omega);
    if (budget > budget_cap) {
        throw BudgetExceededError("run_strategy: stop rule requested " + std::to_string(budget) +
                                  " > cap " + std::to_string(budget_cap));
    }
    RunResult<Point, Answer> out;
    out.trace.nodes.reserve(budget);
    out.trace.answers.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
        Point p = s.next_node(std::span<const Answer>(out.trace.answers), omega);
        Answer y = g.query(p);
        out.trace.nodes.push_back(std::move(p));
        out.trace.answers.push_back(std::move(y));
    }
    out.estimate = s.estimator(std::span<const Answer>(out.trace.answers), omega);
    return out;
}

// Runs the node sequence against the constant-b* oracle for `budget`
// queries and returns the nodes it would place (the set K of the
// lower-bound arguments).
template <class Point, class Answer>
Trace<Point, Answer> baseline_trace(const Strategy<Point, Answer>& s, const Answer& b_star,
                                    std::size_t budget, std::uint64_t omega = 0) {
    if (budget < 1) throw std::invalid_argument("baseline_trace: budget must be >= 1");
    Trace<Point, Answer> trace;
    trace.nodes.reserve(budget);
    trace.answers.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
        Point p = s.next_node(std::span<const Answer>(trace.answers), omega);
        trace.nodes.push_back(std::move(p));
        trace.answers.push_back(b_star);
    }
    return trace;
}

// Nonadaptive rule with a fixed node list and a constant estimator.
template <class Point, class Answer>
Strategy<Point, Answer> fixed_node_strategy(std::vector<Point> nodes,
                                            double estimate_value = 0.0) {
    auto shared = std::make_shared<std::vector<Point>>(std::move(nodes));
    Strategy<Point, Answer> s;
    s.next_node = [shared](std::span<const Answer> prefix, std::uint64_t) {
        return (*shared)[prefix.size() % std::max<std::size_t>(shared->size(), 1)];
    };
    s.stop_rule = [shared](std::string_view, std::uint64_t) { return shared->size(); };
    s.estimator = [estimate_value](std::span<const Answer>, std::uint64_t) {
        return estimate_value;
    };
    s.deterministic = true;
    return s;
}

template <class Point, class Answer>
struct WeightedInput {
    QueryableInput<Point, Answer> input;
    double s_value = 0.0;  // the true functional value S(g)
    double weight = 0.0;
};

struct AverageCaseResult {
    double error = 0.0;
    double std_error = 0.0;  // zero for deterministic strategies
};

// Average-case error with respect to a finitely supported prior: the exact
// weighted sum for deterministic strategies, a Monte Carlo average over the
// randomness handle otherwise.
template <class Point, class Answer>
AverageCaseResult average_case_error(const Strategy<Point, Answer>& s,
                                     std::span<const WeightedInput<Point, Answer>> support,
                                     const std::function<std::uint64_t(std::size_t)>& omega_sampler,
                                     std::size_t n_mc,
                                     std::size_t budget_cap = kDefaultQueryBudgetCap) {
    double wsum = 0.0;
    for (const auto& wi : support) wsum += wi.weight;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("average_case_error: weights must sum to 1");

    auto one_pass = [&](std::uint64_t omega) {
        double acc = 0.0;
        for (const auto& wi : support) {
            const auto run = run_strategy(wi.input, s, omega, budget_cap);
            acc += wi.weight * std::abs(wi.s_value - run.estimate);
        }
        return acc;
    };

    if (s.deterministic) return {one_pass(0), 0.0};

    std::vector<double> passes(n_mc);
    for (std::size_t k = 0; k < n_mc; ++k) passes[k] = one_pass(omega_sampler(k));
    const auto st = mean_and_stderr(passes);
    return {st.mean, st.std_error};
}

struct CostErrorRow {
    std::string tag;
    double abs_error = 0.0;  // |S(g) - estimate|, averaged over omega if randomized
    double cost = 0.0;       // trace length, averaged over omega if randomized
};

// Worst-case error and cost of a strategy measured over a finite input set;
// the empirical surrogate for e(S-hat) and cost(S-hat).  The cost refers to
// the given (node chooser, stop rule, estimator) representation.
struct CostErrorReport {
    double worst_error = 0.0;
    double worst_cost = 0.0;
    std::vector<CostErrorRow> per_input;
};

template <class Point, class Answer>
CostErrorReport measure_strategy(const Strategy<Point, Answer>& s,
                                 std::span<const WeightedInput<Point, Answer>> inputs,
                                 const std::function<std::uint64_t(std::size_t)>& omega_sampler,
                                 std::size_t n_mc,
                                 std::size_t budget_cap = kDefaultQueryBudgetCap) {
    CostErrorReport rep;
    const std::size_t passes = s.deterministic ? 1 : std::max<std::size_t>(n_mc, 1);
    for (const auto& wi : inputs) {
        double err_acc = 0.0;
        double cost_acc = 0.0;
        for (std::size_t k = 0; k < passes; ++k) {
            const std::uint64_t omega = s.deterministic ? 0 : omega_sampler(k);
            const auto run = run_strategy(wi.input, s, omega, budget_cap);
            err_acc += std::abs(wi.s_value - run.estimate);
            cost_acc += static_cast<double>(run.trace.count());
        }
        CostErrorRow row{wi.input.tag, err_acc / passes, cost_acc / passes};
        rep.worst_error = std::max(rep.worst_error, row.abs_error);
        rep.worst_cost = std::max(rep.worst_cost, row.cost);
        rep.per_input.push_back(std::move(row));
    }
    return rep;
}

// A fooling family reduced to what the disjoint supports leave visible:
// the per-index pair values S(g_{i,+}), S(g_{i,-}).
struct GapFamily {
    std::vector<double> s_plus;
    std::vector<double> s_minus;

    std::size_t size() const { return s_plus.size(); }
    double gap(std::size_t i) const { return s_plus[i] - s_minus[i]; }
};

// Exact minimum average-case error over all deterministic strategies whose
// nodes touch at most n_hits supports, under the uniform prior on the 2m
// singletons.  Supports are disjoint, so only support membership matters:
// a touched index is fully identified (contributes 0), an untouched index
// cannot reveal its sign and contributes gap_i / 2 per member.  The
// minimizing hit set removes the largest gaps.
inline double brute_force_min_avg_error(const GapFamily& family, std::size_t n_hits) {
    const std::size_t m = family.size();
    if (m == 0 || family.s_minus.size() != m)
        throw std::invalid_argument("brute_force_min_avg_error: malformed family");
    if (m > 20) throw std::invalid_argument("brute_force_min_avg_error: m capped at 20");
    if (n_hits >= m) return 0.0;
    std::vector<double> gaps(m);
    for (std::size_t i = 0; i < m; ++i) gaps[i] = family.gap(i);
    std::sort(gaps.begin(), gaps.end());  // ascending; keep the smallest untouched
    double untouched = 0.0;
    for (std::size_t i = 0; i < m - n_hits; ++i) untouched += gaps[i];
    return untouched / (2.0 * static_cast<double>(m));
}

}  // namespace hardquad
