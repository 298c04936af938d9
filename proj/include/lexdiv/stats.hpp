#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/errors.hpp"

namespace lexdiv {

class EmptyInputError : public Error {
public:
    EmptyInputError() : Error("statistic over empty input") {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& msg) : Error("alignment: " + msg) {}
};

class DegenerateGroupError : public Error {
public:
    explicit DegenerateGroupError(size_t index)
        : Error("group " + std::to_string(index) + " has fewer than 2 values") {}
};

class LengthMismatchError : public Error {
public:
    LengthMismatchError(size_t a, size_t b)
        : Error("input lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct ShuffleResult {
    std::string metric;
    std::vector<double> values;
    double mean = 0.0;
    double sd = 0.0; // population SD: the shuffles are the whole population
};

ShuffleResult shuffle_aggregate(const std::string& metric, const std::vector<double>& values);

struct TestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    bool defined = true;   // false when the statistic is undefined (constant input)
    std::string note;
    // config
    size_t resamples = 0;
    uint64_t seed = 0;
    std::vector<size_t> group_sizes;

    std::string to_json() const;
    std::string summary() const; // one line
};

using CorpusMetric = std::function<double(const Corpus&)>;

// Paired bootstrap over aligned corpora: delta = metric(a) - metric(b); each
// resample draws document indices with replacement and applies them to both
// sides; p is the fraction of resampled deltas beyond 2*delta on delta's
// side (1.0 when delta is 0). Corpora are aligned by document id.
TestResult paired_bootstrap(const Corpus& responses_a, const Corpus& responses_b,
                            const CorpusMetric& metric, size_t B, uint64_t seed);

// Classical Levene W on absolute deviations from group means, p from the
// F(k-1, N-k) upper tail.
TestResult levene(const std::vector<std::vector<double>>& groups);

// Spearman rank correlation with average ranks for ties; two-sided p via the
// t approximation with n-2 degrees of freedom.
TestResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Regularized incomplete beta I_x(a, b); exposed for tests.
double incomplete_beta(double a, double b, double x);
// Student-t two-sided p for statistic t with nu degrees of freedom.
double student_t_two_sided(double t, double nu);
// F-distribution upper tail P(F > f) with d1, d2 degrees of freedom.
double f_upper_tail(double f, double d1, double d2);

} // namespace lexdiv
