#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "countgof/models.hpp"

namespace countgof::gof {

// The sufficient inputs to every statistic: n, μ̂ₙ, μ̂₂,ₙ, P̂ₙ(0).
struct SampleSummary {
    std::int64_t n = 0;
    double mu_hat = 0.0;
    double mu2_hat = 0.0;
    double p0_hat = 0.0;
};

// Sums are accumulated in integer arithmetic, so the summary (and everything
// downstream) is bit-identical under permutation of the input.
SampleSummary summarize(std::span<const std::int64_t> xs);

struct TestReport {
    double statistic = 0.0;      // Z_n, or Q_n for the chi-squared test
    double raw_numerator = 0.0;  // T̂0 (Q_n repeated for the chi-squared test)
    double sigma_hat = 0.0;      // 0 for the chi-squared test
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.0;
    std::string diagnostics;
};

// √n(ψ₀(μ̂) − P̂ₙ(0))
double t0_one_param(const models::NullFamily1P& fam, const SampleSummary& s);

// Plug-in variance (ψ₀′)²(μ)v(μ) + 2μψ₀(μ)ψ₀′(μ) + ψ₀(μ)(1−ψ₀(μ)); equals
// Var[ψ₀′(μ)X − I₍X=0₎] under the family at mean μ.
double sigma2_one_param(const models::NullFamily1P& fam, double mu);

// Two-sided test Z_n = T̂0/σ̂ₙ with p-value 2(1−Φ(|Z_n|)). Throws
// DegenerateSampleError when the sample is all zeros or σ̂ₙ² vanishes.
TestReport z_test_one_param(const models::NullFamily1P& fam,
                            std::span<const std::int64_t> xs, double alpha);

double t0_two_param(const models::NullFamily2P& fam, const SampleSummary& s);

// Sample variance (1/(n−1))Σ(w₁Xₗ + w₂Xₗ² − M)² of the weighted transform,
// centered at its own sample mean M.
double vhat_weighted(std::span<const std::int64_t> xs, double w1, double w2);

// vhat_weighted with weights ∂ψ₀/∂μ and ∂ψ₀/∂μ₂ at (μ̂, μ̂₂).
double vhat_two_param(const models::NullFamily2P& fam,
                      std::span<const std::int64_t> xs, const SampleSummary& s);

// σ̂ₙ² = v̂ₙ + 2(∂ψ₀/∂μ·μ̂ + ∂ψ₀/∂μ₂·μ̂₂)ψ₀ + ψ₀(1−ψ₀).
TestReport z_test_two_param(const models::NullFamily2P& fam,
                            std::span<const std::int64_t> xs, double alpha);

// |ψ₀(μ) − p0_true| / ψ₀(μ): the L¹ distance behind the statistic.
double l1_discrepancy(const models::NullFamily1P& fam, double mu, double p0_true);

double normal_cdf(double z);

// Sorted (value, count) pairs; the canonical order every statistic iterates in.
std::vector<std::pair<std::int64_t, std::int64_t>> value_counts(
    std::span<const std::int64_t> xs);

}  // namespace countgof::gof
