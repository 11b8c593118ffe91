#include "countgof/contiguous.hpp"

#include <cmath>

#include "countgof/errors.hpp"

namespace countgof::contig {

namespace {

constexpr double kMeanMatchTol = 1e-12;

void check_rate(double lambda, std::int64_t n) {
    if (n < 1) throw DomainError("contiguous spec: n must be >= 1");
    if (!(lambda >= 0.0))
        throw DomainError("contiguous spec: lambda must be >= 0");
    if (lambda / std::sqrt(static_cast<double>(n)) > 1.0)
        throw DomainError("contiguous spec: lambda/sqrt(n) must be in [0,1]");
}

void check_mean_match(double base_mean, const models::AltDistribution& y) {
    if (std::abs(y.mean() - base_mean) > kMeanMatchTol)
        throw DomainError("contaminant mean " + std::to_string(y.mean()) +
                          " does not match the base mean " +
                          std::to_string(base_mean));
}

}  // namespace

double MixtureSpec::contamination_prob() const {
    return lambda / std::sqrt(static_cast<double>(n));
}

double ThinningSpec::keep_prob() const {
    return 1.0 - lambda / std::sqrt(static_cast<double>(n));
}

MixtureSpec make_mixture_spec(const models::NullFamily1P& base, double mu,
                              models::AltDistribution contaminant, double lambda,
                              std::int64_t n) {
    base.check_mean(mu);
    check_rate(lambda, n);
    check_mean_match(mu, contaminant);
    return {&base, nullptr, mu, 0.0, std::move(contaminant), lambda, n};
}

MixtureSpec make_mixture_spec(const models::NullFamily2P& base, double mu,
                              double mu2, models::AltDistribution contaminant,
                              double lambda, std::int64_t n) {
    base.check_moments(mu, mu2);
    check_rate(lambda, n);
    check_mean_match(mu, contaminant);
    return {nullptr, &base, mu, mu2, std::move(contaminant), lambda, n};
}

ThinningSpec make_thinning_spec(const models::NullFamily1P& base, double mu,
                                double lambda, std::int64_t n) {
    base.check_mean(mu);
    check_rate(lambda, n);
    return {&base, mu, lambda, n};
}

void sample_mixture_contig(const MixtureSpec& spec,
                           models::InversionSampler& base_sampler,
                           models::InversionSampler& contaminant_sampler,
                           CounterRng& rng, std::vector<std::int64_t>& out) {
    const double p_contaminate = spec.contamination_prob();
    out.resize(static_cast<std::size_t>(spec.n));
    for (auto& x : out) {
        const bool contaminate = rng.next_bernoulli(p_contaminate);
        x = contaminate ? contaminant_sampler.draw(rng) : base_sampler.draw(rng);
    }
}

std::vector<std::int64_t> sample_mixture_contig(const MixtureSpec& spec,
                                                CounterRng& rng) {
    models::InversionSampler base =
        spec.base1 ? models::InversionSampler(*spec.base1, spec.mu)
                   : models::InversionSampler(*spec.base2, spec.mu, spec.mu2);
    models::InversionSampler contaminant(spec.contaminant);
    std::vector<std::int64_t> out;
    sample_mixture_contig(spec, base, contaminant, rng, out);
    return out;
}

void sample_thinning_contig(const ThinningSpec& spec,
                            models::InversionSampler& base_sampler,
                            CounterRng& rng, std::vector<std::int64_t>& out) {
    const double keep = spec.keep_prob();
    out.resize(static_cast<std::size_t>(spec.n));
    for (auto& x : out) {
        const std::int64_t raw = base_sampler.draw(rng);
        if (keep == 1.0) {
            x = raw;
            continue;
        }
        std::int64_t kept = 0;
        for (std::int64_t j = 0; j < raw; ++j) kept += rng.next_bernoulli(keep);
        x = kept;
    }
}

std::vector<std::int64_t> sample_thinning_contig(const ThinningSpec& spec,
                                                 CounterRng& rng) {
    models::InversionSampler base(*spec.base, spec.mu);
    std::vector<std::int64_t> out;
    sample_thinning_contig(spec, base, rng, out);
    return out;
}

double prop2_shift(const models::NullFamily1P& fam, double mu,
                   const models::AltDistribution& y, double lambda) {
    fam.check_mean(mu);
    check_mean_match(mu, y);
    return lambda * (fam.psi0(mu) - y.pmf(0));
}

double remark1_shift(const models::NullFamily1P& fam, double mu, double lambda) {
    fam.check_mean(mu);
    return -lambda * (fam.pmf(1, mu) + mu);
}

double prop3_shift(const models::NullFamily2P& fam, double mu, double mu2,
                   const models::AltDistribution& y, double lambda) {
    fam.check_moments(mu, mu2);
    check_mean_match(mu, y);
    return lambda * (fam.psi0(mu, mu2) - y.pmf(0) +
                     fam.dpsi0_dmu2(mu, mu2) * (y.second_moment() - mu2));
}

}  // namespace countgof::contig
