#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "countgof/rng.hpp"

namespace countgof::models {

// A one-parameter count family re-parametrized by its mean, exposing exactly
// what the tests consume: the zero-probability map ψ₀ and its derivative, the
// closed-form variance, the natural parameter h⁻¹(μ), and the p.m.f.
//
// Instances are immutable singletons; every member is pure.
class NullFamily1P {
public:
    virtual ~NullFamily1P() = default;

    virtual std::string_view id() const = 0;

    // Throws DomainError when mu is outside the mean domain.
    virtual void check_mean(double mu) const = 0;

    // P(X = 0) at mean mu.
    virtual double psi0(double mu) const = 0;
    virtual double psi0_prime(double mu) const = 0;

    // Var[X] at mean mu.
    virtual double variance(double mu) const = 0;

    // h⁻¹(mu): the family's natural parameter.
    virtual double natural_param(double mu) const = 0;

    // The family's own algebraic simplification of the plug-in test variance;
    // must agree with the generic assembly in gof to 1e-12.
    virtual double sigma2_closed_form(double mu) const = 0;

    double pmf(std::int64_t n, double mu) const;

protected:
    // log P(X = n) for n >= 1; n = 0 is routed through psi0 so that
    // pmf(0, mu) and psi0(mu) are the same code path.
    virtual double log_pmf_pos(std::int64_t n, double mu) const = 0;
};

// A two-parameter family re-parametrized by its first two raw moments.
class NullFamily2P {
public:
    virtual ~NullFamily2P() = default;

    virtual std::string_view id() const = 0;

    // Throws DomainError naming the violated inequality.
    virtual void check_moments(double mu, double mu2) const = 0;
    virtual bool in_moment_domain(double mu, double mu2) const = 0;

    virtual double psi0(double mu, double mu2) const = 0;
    virtual double dpsi0_dmu(double mu, double mu2) const = 0;
    virtual double dpsi0_dmu2(double mu, double mu2) const = 0;

    // h⁻¹(mu, mu2) -> (alpha, theta) and the forward map h.
    virtual std::pair<double, double> natural_params(double mu, double mu2) const = 0;
    virtual std::pair<double, double> moments(double alpha, double theta) const = 0;

    // The r_n-route simplification of ŝₙ; must agree with the generic
    // assembly 2(∂ψ₀/∂μ·μ + ∂ψ₀/∂μ₂·μ₂)ψ₀ to 1e-10.
    virtual double shat_simplified(double mu, double mu2) const = 0;

    double pmf(std::int64_t n, double mu, double mu2) const;

protected:
    virtual double log_pmf_pos(std::int64_t n, double mu, double mu2) const = 0;
};

const NullFamily1P& shifted_borel_family();
const NullFamily1P& geometric_family();
const NullFamily1P& bell1_family();
const NullFamily2P& bell2_family();

// Lookup by the stable ids used in the CLI and CSV output
// (shifted-borel, geometric, bell1, bell2). Null when unknown.
const NullFamily1P* find_family_1p(std::string_view id);
const NullFamily2P* find_family_2p(std::string_view id);

// An alternative data-generating law: p.m.f. plus the moments the contiguous
// machinery needs. Immutable; sampling goes through InversionSampler.
class AltDistribution {
public:
    AltDistribution(std::string label, double mean, std::optional<double> variance,
                    std::function<double(std::int64_t)> pmf);

    const std::string& id() const { return label_; }
    double pmf(std::int64_t n) const { return pmf_(n); }
    double mean() const { return mean_; }
    std::optional<double> variance() const { return variance_; }
    double second_moment() const;  // throws DomainError when variance unknown

private:
    std::string label_;
    double mean_;
    std::optional<double> variance_;
    std::function<double(std::int64_t)> pmf_;
};

// Catalog ids: poisson, mix-poisson, binomial, neg-binomial, gen-hermite,
// discrete-uniform, log-series, gen-poisson, zi-binomial, zi-neg-binomial,
// zip. Throws std::invalid_argument for unknown ids, DomainError for
// parameters outside the law's domain.
AltDistribution alt_catalog(std::string_view id, std::span<const double> params);

// Parse "id:p1,p2,..." (the CLI/grid-config syntax).
AltDistribution alt_from_spec(std::string_view text);

// Inversion through the cumulative p.m.f.: the table extends on demand, one
// uniform per draw. Not shareable across threads; build one per unit of work.
class InversionSampler {
public:
    explicit InversionSampler(std::function<double(std::int64_t)> pmf);
    explicit InversionSampler(const AltDistribution& dist);
    InversionSampler(const NullFamily1P& fam, double mu);
    InversionSampler(const NullFamily2P& fam, double mu, double mu2);

    std::int64_t draw(CounterRng& rng);

private:
    void extend_to(double target);

    std::function<double(std::int64_t)> pmf_;
    std::vector<double> cdf_;
    bool exhausted_ = false;
};

std::vector<std::int64_t> sample_iid(const NullFamily1P& fam, double mu,
                                     std::size_t n, CounterRng& rng);
std::vector<std::int64_t> sample_iid(const NullFamily2P& fam, double mu,
                                     double mu2, std::size_t n, CounterRng& rng);
std::vector<std::int64_t> sample_iid(const AltDistribution& dist, std::size_t n,
                                     CounterRng& rng);

// Shifted Borel drawn as the total progeny of a Poisson(λ) branching process
// minus one. Same law as the inversion sampler; kept as an independent route
// for the sampler consistency checks.
std::int64_t sample_borel_branching(CounterRng& rng, double mu);

// Poisson variate by sequential inversion (small means).
std::int64_t sample_poisson_small(CounterRng& rng, double lambda);

}  // namespace countgof::models
