#include "lexdiv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "lexdiv/rng.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv {

ShuffleResult shuffle_aggregate(const std::string& metric, const std::vector<double>& values) {
    if (values.empty()) throw EmptyInputError();
    ShuffleResult out;
    out.metric = metric;
    out.values = values;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

std::string TestResult::to_json() const {
    std::ostringstream ss;
    ss << "{\"test\":\"" << test << "\",\"statistic\":" << format_double(statistic, 10)
       << ",\"p_value\":" << format_double(p_value, 10) << ",\"defined\":" << (defined ? "true" : "false");
    if (resamples) ss << ",\"resamples\":" << resamples;
    if (resamples) ss << ",\"seed\":" << seed;
    if (!group_sizes.empty()) {
        ss << ",\"group_sizes\":[";
        for (size_t i = 0; i < group_sizes.size(); ++i) ss << (i ? "," : "") << group_sizes[i];
        ss << "]";
    }
    if (!note.empty()) ss << ",\"note\":\"" << note << "\"";
    ss << "}";
    return ss.str();
}

std::string TestResult::summary() const {
    std::ostringstream ss;
    ss << test << ": statistic=" << format_double(statistic, 6) << " p=" << format_double(p_value, 6);
    if (!defined) ss << " (undefined)";
    if (!note.empty()) ss << " [" << note << "]";
    return ss.str();
}

TestResult paired_bootstrap(const Corpus& responses_a, const Corpus& responses_b,
                            const CorpusMetric& metric, size_t B, uint64_t seed) {
    if (B < 100) throw ConfigError("bootstrap needs B >= 100");
    if (responses_a.size() != responses_b.size())
        throw AlignmentError("corpus sizes differ: " + std::to_string(responses_a.size()) + " vs " +
                             std::to_string(responses_b.size()));

    // Align b to a's id order.
    std::map<std::string, const Document*> b_by_id;
    for (const auto& d : responses_b.docs()) b_by_id[d.id] = &d;
    std::vector<const Document*> a_docs, b_docs;
    for (const auto& d : responses_a.docs()) {
        auto it = b_by_id.find(d.id);
        if (it == b_by_id.end()) throw AlignmentError("id \"" + d.id + "\" missing from second corpus");
        a_docs.push_back(&d);
        b_docs.push_back(it->second);
    }

    auto metric_on = [&metric](const std::vector<const Document*>& docs,
                               const std::vector<size_t>& idx) {
        std::vector<Document> sub;
        sub.reserve(idx.size());
        for (size_t k = 0; k < idx.size(); ++k) {
            Document d = *docs[idx[k]];
            d.id = std::to_string(k); // resampling may repeat ids
            sub.push_back(std::move(d));
        }
        return metric(Corpus(std::move(sub), SourceInfo{"bootstrap", "", ""}));
    };

    std::vector<size_t> identity(a_docs.size());
    for (size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    const double delta = metric_on(a_docs, identity) - metric_on(b_docs, identity);

    TestResult result;
    result.test = "paired-bootstrap";
    result.statistic = delta;
    result.resamples = B;
    result.seed = seed;
    result.group_sizes = {responses_a.size(), responses_b.size()};

    if (delta == 0.0) {
        result.p_value = 1.0;
        return result;
    }

    size_t extreme = 0;
    const size_t n = a_docs.size();
    for (size_t b = 0; b < B; ++b) {
        Rng rng = Rng::substream(seed, b);
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = static_cast<size_t>(rng.bounded(n));
        const double delta_b = metric_on(a_docs, idx) - metric_on(b_docs, idx);
        if (delta > 0.0 ? delta_b > 2.0 * delta : delta_b < 2.0 * delta) ++extreme;
    }
    result.p_value = static_cast<double>(extreme) / static_cast<double>(B);
    return result;
}

namespace {

// Lentz's continued fraction for the incomplete beta, as in the classic
// numerical recipes formulation.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double student_t_two_sided(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    // P(|T| > t) = I_{nu/(nu + t^2)}(nu/2, 1/2)
    return incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

TestResult levene(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ConfigError("levene needs >= 2 groups");
    for (size_t i = 0; i < groups.size(); ++i)
        if (groups[i].size() < 2) throw DegenerateGroupError(i);

    const size_t k = groups.size();
    size_t n_total = 0;
    std::vector<std::vector<double>> z(k);
    std::vector<double> z_group_mean(k);
    double z_grand = 0.0;
    for (size_t i = 0; i < k; ++i) {
        const auto& g = groups[i];
        n_total += g.size();
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        z[i].reserve(g.size());
        for (double y : g) z[i].push_back(std::fabs(y - mean));
        z_group_mean[i] =
            std::accumulate(z[i].begin(), z[i].end(), 0.0) / static_cast<double>(z[i].size());
        z_grand += z_group_mean[i] * static_cast<double>(g.size());
    }
    z_grand /= static_cast<double>(n_total);

    double numerator = 0.0, denominator = 0.0;
    for (size_t i = 0; i < k; ++i) {
        numerator += static_cast<double>(groups[i].size()) *
                     (z_group_mean[i] - z_grand) * (z_group_mean[i] - z_grand);
        for (double zij : z[i]) denominator += (zij - z_group_mean[i]) * (zij - z_group_mean[i]);
    }

    TestResult result;
    result.test = "levene";
    for (const auto& g : groups) result.group_sizes.push_back(g.size());

    if (denominator == 0.0) {
        // All deviations identical within groups; no evidence of unequal
        // variances (this includes all-constant groups).
        result.statistic = 0.0;
        result.p_value = 1.0;
        if (numerator != 0.0) result.note = "zero within-group deviation";
        return result;
    }

    const double d1 = static_cast<double>(k - 1);
    const double d2 = static_cast<double>(n_total - k);
    result.statistic = (d2 / d1) * (numerator / denominator);
    result.p_value = f_upper_tail(result.statistic, d1, d2);
    return result;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const size_t n = xs.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

TestResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw LengthMismatchError(xs.size(), ys.size());
    if (xs.size() < 3) throw ConfigError("spearman needs >= 3 points");

    TestResult result;
    result.test = "spearman";
    result.group_sizes = {xs.size()};

    const bool x_const = std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; });
    const bool y_const = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; });
    if (x_const || y_const) {
        result.defined = false;
        result.statistic = std::numeric_limits<double>::quiet_NaN();
        result.p_value = 1.0;
        result.note = "constant input: rho undefined";
        return result;
    }

    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    result.statistic = rho;

    const double nu = n - 2.0;
    if (std::fabs(rho) >= 1.0) {
        result.p_value = 0.0;
    } else {
        const double t = rho * std::sqrt(nu / (1.0 - rho * rho));
        result.p_value = student_t_two_sided(t, nu);
    }
    return result;
}

} // namespace lexdiv
