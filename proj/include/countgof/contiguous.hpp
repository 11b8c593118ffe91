#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "countgof/models.hpp"
#include "countgof/rng.hpp"

namespace countgof::contig {

// Shrinking mixture: each draw is the base variable with probability
// 1 − λ/√n and the mean-matched contaminant Y otherwise. Mean matching
// |E[Y] − E[X]| ≤ 1e-12 is validated at construction, not repaired.
struct MixtureSpec {
    const models::NullFamily1P* base1 = nullptr;
    const models::NullFamily2P* base2 = nullptr;
    double mu = 0.0;
    double mu2 = 0.0;  // meaningful only with base2
    models::AltDistribution contaminant;
    double lambda = 0.0;
    std::int64_t n = 0;

    double contamination_prob() const;
};

MixtureSpec make_mixture_spec(const models::NullFamily1P& base, double mu,
                              models::AltDistribution contaminant, double lambda,
                              std::int64_t n);
MixtureSpec make_mixture_spec(const models::NullFamily2P& base, double mu,
                              double mu2, models::AltDistribution contaminant,
                              double lambda, std::int64_t n);

// Binomial thinning: each draw is Σ_{j=1}^{X} Bernoulli(α) with
// α = 1 − λ/√n.
struct ThinningSpec {
    const models::NullFamily1P* base = nullptr;
    double mu = 0.0;
    double lambda = 0.0;
    std::int64_t n = 0;

    double keep_prob() const;
};

ThinningSpec make_thinning_spec(const models::NullFamily1P& base, double mu,
                                double lambda, std::int64_t n);

std::vector<std::int64_t> sample_mixture_contig(const MixtureSpec& spec,
                                                CounterRng& rng);
std::vector<std::int64_t> sample_thinning_contig(const ThinningSpec& spec,
                                                 CounterRng& rng);

// Sampler-reusing cores for replication loops.
void sample_mixture_contig(const MixtureSpec& spec,
                           models::InversionSampler& base_sampler,
                           models::InversionSampler& contaminant_sampler,
                           CounterRng& rng, std::vector<std::int64_t>& out);
void sample_thinning_contig(const ThinningSpec& spec,
                            models::InversionSampler& base_sampler,
                            CounterRng& rng, std::vector<std::int64_t>& out);

// Asymptotic centering of T̃₀ under the shrinking mixture:
// λ(P(X=0) − P(Y=0)).
double prop2_shift(const models::NullFamily1P& fam, double mu,
                   const models::AltDistribution& y, double lambda);

// Centering under binomial thinning: −λ(P(X=1) + μ).
double remark1_shift(const models::NullFamily1P& fam, double mu, double lambda);

// Two-parameter mixture centering:
// λ(P(X=0) − P(Y=0) + ∂ψ₀/∂μ₂·(E[Y²] − E[X²])).
double prop3_shift(const models::NullFamily2P& fam, double mu, double mu2,
                   const models::AltDistribution& y, double lambda);

}  // namespace countgof::contig
