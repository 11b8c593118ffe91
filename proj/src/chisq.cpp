#include "countgof/chisq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "countgof/errors.hpp"

namespace countgof::chisq {

namespace {

constexpr std::int64_t kTailHi = std::numeric_limits<std::int64_t>::max();

// Lower regularized incomplete gamma by power series, for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction, x >= a+1.
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

void check_chi2_args(double x, double df) {
    if (!(df > 0.0)) throw DomainError("chi-squared: df must be > 0");
    if (std::isnan(x)) throw DomainError("chi-squared: x is NaN");
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("gamma_p: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_cdf(double x, double df) {
    check_chi2_args(x, df);
    if (x <= 0.0) return 0.0;
    return gamma_p(df / 2.0, x / 2.0);
}

double chi2_sf(double x, double df) {
    check_chi2_args(x, df);
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

std::size_t ClassPartition::index_of(std::int64_t value) const {
    for (std::size_t i = 0; i < bins.size(); ++i)
        if (value >= bins[i].lo && value <= bins[i].hi) return i;
    // values below bins.front().lo cannot occur (counts are nonnegative)
    return bins.size() - 1;
}

ClassPartition build_classes(double mu,
                             const std::function<double(std::int64_t)>& pmf) {
    if (!(mu >= 0.0)) throw DomainError("build_classes: mu must be >= 0");
    const double spread = 3.0 * std::sqrt(mu);
    const auto a = static_cast<std::int64_t>(std::floor(mu - spread));
    const auto b = static_cast<std::int64_t>(std::ceil(mu + spread));

    ClassPartition out;
    double cum = 0.0;
    if (a >= 1) {
        double p = 0.0;
        for (std::int64_t m = 0; m < a; ++m) p += pmf(m);
        cum = p;
        out.bins.push_back({0, a - 1, p});
    }
    for (std::int64_t m = std::max<std::int64_t>(a, 0); m <= b; ++m) {
        const double p = pmf(m);
        cum += p;
        out.bins.push_back({m, m, p});
    }
    out.bins.push_back({b + 1, kTailHi, std::max(0.0, 1.0 - cum)});
    return out;
}

ClassPartition build_classes(const models::NullFamily1P& fam, double mu) {
    fam.check_mean(mu);
    return build_classes(mu, [&fam, mu](std::int64_t n) { return fam.pmf(n, mu); });
}

ClassPartition build_classes(const models::NullFamily2P& fam, double mu,
                             double mu2) {
    fam.check_moments(mu, mu2);
    return build_classes(
        mu, [&fam, mu, mu2](std::int64_t n) { return fam.pmf(n, mu, mu2); });
}

double q_statistic(const ClassPartition& partition,
                   std::span<const std::int64_t> class_counts, std::int64_t n) {
    if (class_counts.size() != partition.bins.size())
        throw std::invalid_argument("q_statistic: counts do not match partition");
    double q = 0.0;
    for (std::size_t i = 0; i < partition.bins.size(); ++i) {
        const double expected = static_cast<double>(n) * partition.bins[i].prob;
        const double observed = static_cast<double>(class_counts[i]);
        if (expected <= 0.0) {
            if (observed > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = observed - expected;
        q += d * d / expected;
    }
    return q;
}

namespace {

gof::TestReport finish_q_report(const ClassPartition& partition,
                                std::span<const std::int64_t> xs, double alpha,
                                int estimated_params) {
    std::vector<std::int64_t> counts(partition.bins.size(), 0);
    for (const auto& [value, count] : gof::value_counts(xs))
        counts[partition.index_of(value)] += count;

    const int df =
        static_cast<int>(partition.bins.size()) - 1 - estimated_params;
    if (df <= 0)
        throw DegenerateSampleError(
            "chi-squared test has no degrees of freedom (df = " +
            std::to_string(df) + ")");

    const double q =
        q_statistic(partition, counts, static_cast<std::int64_t>(xs.size()));
    gof::TestReport report;
    report.statistic = q;
    report.raw_numerator = q;
    report.sigma_hat = 0.0;
    report.p_value = std::isinf(q) ? 0.0 : chi2_sf(q, df);
    report.alpha = alpha;
    report.reject = report.p_value < alpha;
    report.diagnostics = "df=" + std::to_string(df);
    return report;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0,1)");
}

}  // namespace

gof::TestReport q_test(const models::NullFamily1P& fam,
                       std::span<const std::int64_t> xs, double alpha) {
    check_alpha(alpha);
    const gof::SampleSummary s = gof::summarize(xs);
    if (s.mu_hat == 0.0)
        throw DegenerateSampleError("all observations are zero; Q_n is undefined");
    return finish_q_report(build_classes(fam, s.mu_hat), xs, alpha, 1);
}

gof::TestReport q_test(const models::NullFamily2P& fam,
                       std::span<const std::int64_t> xs, double alpha) {
    check_alpha(alpha);
    const gof::SampleSummary s = gof::summarize(xs);
    if (s.mu_hat == 0.0)
        throw DegenerateSampleError("all observations are zero; Q_n is undefined");
    return finish_q_report(build_classes(fam, s.mu_hat, s.mu2_hat), xs, alpha, 2);
}

}  // namespace countgof::chisq
