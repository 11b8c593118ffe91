#include "countgof/gof.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "countgof/errors.hpp"

namespace countgof::gof {

namespace {

constexpr double kSigmaFloor = 1e-14;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0,1)");
}

TestReport finish_z_report(double t0, double sigma2, double alpha) {
    if (!(sigma2 > kSigmaFloor))
        throw DegenerateSampleError(
            "plug-in variance is numerically zero; no test statistic");
    const double sigma = std::sqrt(sigma2);
    const double z = t0 / sigma;
    TestReport report;
    report.statistic = z;
    report.raw_numerator = t0;
    report.sigma_hat = sigma;
    report.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    report.alpha = alpha;
    report.reject = report.p_value < alpha;
    return report;
}

}  // namespace

std::vector<std::pair<std::int64_t, std::int64_t>> value_counts(
    std::span<const std::int64_t> xs) {
    std::vector<std::int64_t> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.emplace_back(sorted[i], static_cast<std::int64_t>(j - i));
        i = j;
    }
    return out;
}

SampleSummary summarize(std::span<const std::int64_t> xs) {
    if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
    std::uint64_t sum = 0;
    unsigned __int128 sum2 = 0;
    std::int64_t zeros = 0;
    for (const std::int64_t x : xs) {
        if (x < 0) throw DomainError("summarize: counts must be nonnegative");
        sum += static_cast<std::uint64_t>(x);
        sum2 += static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(x);
        zeros += x == 0;
    }
    const auto n = static_cast<std::int64_t>(xs.size());
    SampleSummary s;
    s.n = n;
    s.mu_hat = static_cast<double>(sum) / static_cast<double>(n);
    s.mu2_hat = static_cast<double>(sum2) / static_cast<double>(n);
    s.p0_hat = static_cast<double>(zeros) / static_cast<double>(n);
    return s;
}

double t0_one_param(const models::NullFamily1P& fam, const SampleSummary& s) {
    fam.check_mean(s.mu_hat);
    return std::sqrt(static_cast<double>(s.n)) * (fam.psi0(s.mu_hat) - s.p0_hat);
}

double sigma2_one_param(const models::NullFamily1P& fam, double mu) {
    fam.check_mean(mu);
    const double p0 = fam.psi0(mu);
    const double p0p = fam.psi0_prime(mu);
    return p0p * p0p * fam.variance(mu) + 2.0 * mu * p0 * p0p + p0 * (1.0 - p0);
}

TestReport z_test_one_param(const models::NullFamily1P& fam,
                            std::span<const std::int64_t> xs, double alpha) {
    check_alpha(alpha);
    const SampleSummary s = summarize(xs);
    if (s.mu_hat == 0.0)
        throw DegenerateSampleError("all observations are zero; Z_n is 0/0");
    return finish_z_report(t0_one_param(fam, s), sigma2_one_param(fam, s.mu_hat),
                           alpha);
}

double t0_two_param(const models::NullFamily2P& fam, const SampleSummary& s) {
    fam.check_moments(s.mu_hat, s.mu2_hat);
    return std::sqrt(static_cast<double>(s.n)) *
           (fam.psi0(s.mu_hat, s.mu2_hat) - s.p0_hat);
}

double vhat_weighted(std::span<const std::int64_t> xs, double w1, double w2) {
    if (xs.size() < 2)
        throw std::invalid_argument("vhat_weighted: need at least 2 observations");
    const auto counts = value_counts(xs);
    const auto n = static_cast<double>(xs.size());
    const auto w = [&](std::int64_t v) {
        const double x = static_cast<double>(v);
        return w1 * x + w2 * x * x;
    };
    double mean = 0.0;
    for (const auto& [v, c] : counts) mean += static_cast<double>(c) * w(v);
    mean /= n;
    double ss = 0.0;
    for (const auto& [v, c] : counts) {
        const double d = w(v) - mean;
        ss += static_cast<double>(c) * d * d;
    }
    return ss / (n - 1.0);
}

double vhat_two_param(const models::NullFamily2P& fam,
                      std::span<const std::int64_t> xs, const SampleSummary& s) {
    fam.check_moments(s.mu_hat, s.mu2_hat);
    return vhat_weighted(xs, fam.dpsi0_dmu(s.mu_hat, s.mu2_hat),
                         fam.dpsi0_dmu2(s.mu_hat, s.mu2_hat));
}

TestReport z_test_two_param(const models::NullFamily2P& fam,
                            std::span<const std::int64_t> xs, double alpha) {
    check_alpha(alpha);
    const SampleSummary s = summarize(xs);
    if (s.mu_hat == 0.0)
        throw DegenerateSampleError("all observations are zero; Z_n is 0/0");
    fam.check_moments(s.mu_hat, s.mu2_hat);
    const double p0 = fam.psi0(s.mu_hat, s.mu2_hat);
    const double a = fam.dpsi0_dmu(s.mu_hat, s.mu2_hat);
    const double b = fam.dpsi0_dmu2(s.mu_hat, s.mu2_hat);
    const double vhat = vhat_weighted(xs, a, b);
    const double shat = 2.0 * (a * s.mu_hat + b * s.mu2_hat) * p0;
    const double sigma2 = vhat + shat + p0 * (1.0 - p0);
    return finish_z_report(t0_two_param(fam, s), sigma2, alpha);
}

double l1_discrepancy(const models::NullFamily1P& fam, double mu, double p0_true) {
    fam.check_mean(mu);
    if (!(p0_true >= 0.0 && p0_true <= 1.0))
        throw std::invalid_argument("l1_discrepancy: p0_true must be in [0,1]");
    const double p0 = fam.psi0(mu);
    if (!(p0 > 0.0)) throw DomainError("l1_discrepancy: psi0(mu) is zero");
    return std::abs(p0 - p0_true) / p0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace countgof::gof
