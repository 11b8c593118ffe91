#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "countgof/gof.hpp"
#include "countgof/models.hpp"

namespace countgof::chisq {

// One class of the fixed construction: an inclusive value range plus its
// expected probability under the fitted null. The upper tail has
// hi == int64 max and carries the exact complement probability.
struct ClassBin {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    double prob = 0.0;
};

struct ClassPartition {
    std::vector<ClassBin> bins;

    std::size_t index_of(std::int64_t value) const;
};

// The fixed rule: C₁ = {n < floor(μ − 3√μ)} (dropped when empty),
// C_k = {n > ceil(μ + 3√μ)}, singletons in between. Probabilities from the
// supplied p.m.f.; the tail gets 1 minus the rest.
ClassPartition build_classes(double mu,
                             const std::function<double(std::int64_t)>& pmf);
ClassPartition build_classes(const models::NullFamily1P& fam, double mu);
ClassPartition build_classes(const models::NullFamily2P& fam, double mu,
                             double mu2);

// Σ (observed − n·p)²/(n·p) over the partition's classes.
double q_statistic(const ClassPartition& partition,
                   std::span<const std::int64_t> class_counts, std::int64_t n);

// Chi-squared test with moment plug-ins and df = #classes − 1 − #parameters.
// Throws DegenerateSampleError when df ≤ 0 or the sample is all zeros.
gof::TestReport q_test(const models::NullFamily1P& fam,
                       std::span<const std::int64_t> xs, double alpha);
gof::TestReport q_test(const models::NullFamily2P& fam,
                       std::span<const std::int64_t> xs, double alpha);

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 − P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);

}  // namespace countgof::chisq
