#pragma once

// Test-side oracles. Everything here reaches results by an independent route
// from the code under test: explicit enumeration, alternative recurrences,
// p.m.f. summation, finite differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "countgof/chisq.hpp"
#include "countgof/gof.hpp"
#include "countgof/models.hpp"

namespace testsupport {

// Number of set partitions of {1..n} by explicit enumeration: walk the tree
// "element i joins an existing block or opens a new one" and count leaves.
inline std::uint64_t count_set_partitions(int n) {
    std::uint64_t leaves = 0;
    const auto walk = [&](auto&& self, int placed, int blocks) -> void {
        if (placed == n) {
            ++leaves;
            return;
        }
        for (int b = 0; b <= blocks; ++b) self(self, placed + 1, std::max(blocks, b + 1));
    };
    walk(walk, 0, 0);
    return leaves;
}

// Partitions of {1..n} into exactly j blocks, by the same enumeration.
inline std::uint64_t count_set_partitions_with_blocks(int n, int j) {
    std::uint64_t leaves = 0;
    const auto walk = [&](auto&& self, int placed, int blocks) -> void {
        if (placed == n) {
            leaves += blocks == j;
            return;
        }
        for (int b = 0; b <= blocks; ++b) self(self, placed + 1, std::max(blocks, b + 1));
    };
    walk(walk, 0, 0);
    return leaves;
}

// Bell numbers B_0..B_nmax by the triangle recurrence (exact, nmax <= 25).
inline std::vector<std::uint64_t> bell_triangle(int nmax) {
    std::vector<std::uint64_t> bells{1};
    std::vector<std::uint64_t> row{1};
    for (int n = 1; n <= nmax; ++n) {
        std::vector<std::uint64_t> next(row.size() + 1);
        next[0] = row.back();
        for (std::size_t i = 0; i < row.size(); ++i) next[i + 1] = next[i] + row[i];
        bells.push_back(next[0]);
        row = std::move(next);
    }
    return bells;
}

// Bell numbers by the binomial-sum recurrence B_{n+1} = Σ C(n,k) B_k.
inline std::vector<std::uint64_t> bell_binomial_sum(int nmax) {
    std::vector<std::uint64_t> bells{1};
    for (int n = 0; n < nmax; ++n) {
        std::uint64_t acc = 0;
        std::uint64_t choose = 1;  // C(n, 0)
        for (int k = 0; k <= n; ++k) {
            acc += choose * bells[static_cast<std::size_t>(k)];
            choose = choose * static_cast<std::uint64_t>(n - k) /
                     static_cast<std::uint64_t>(k + 1);
        }
        bells.push_back(acc);
    }
    return bells;
}

struct PmfMoments {
    double total = 0;
    double mean = 0;
    double second = 0;
};

// Adaptive truncation: accumulate until the running tail contribution to the
// second moment falls below 1e-16 and coverage passed 1 - 1e-12.
inline PmfMoments pmf_moments(const std::function<double(std::int64_t)>& pmf,
                              std::int64_t cap = 200000) {
    PmfMoments m;
    for (std::int64_t n = 0; n < cap; ++n) {
        const double p = pmf(n);
        const double x = static_cast<double>(n);
        m.total += p;
        m.mean += x * p;
        m.second += x * x * p;
        if (m.total > 1.0 - 1e-12 && p * (x * x + 1.0) < 1e-16) break;
    }
    return m;
}

// Var[psi0'(mu) X - I{X=0}] under the family at mean mu, by p.m.f. summation.
inline double sigma2_by_pmf_sum(const countgof::models::NullFamily1P& fam,
                                double mu) {
    const double w = fam.psi0_prime(mu);
    double e1 = 0, e2 = 0, total = 0;
    for (std::int64_t n = 0; n < 200000; ++n) {
        const double p = fam.pmf(n, mu);
        const double t = w * static_cast<double>(n) - (n == 0 ? 1.0 : 0.0);
        e1 += t * p;
        e2 += t * t * p;
        total += p;
        const double x = static_cast<double>(n);
        if (total > 1.0 - 1e-13 && p * (x * x + 1.0) * (w * w + 1.0) < 1e-18) break;
    }
    return e2 - e1 * e1;
}

// Var[a X + b X^2 - I{X=0}] under bell2 at (mu, mu2), by p.m.f. summation.
inline double sigma2_by_pmf_sum_2p(const countgof::models::NullFamily2P& fam,
                                   double mu, double mu2) {
    const double a = fam.dpsi0_dmu(mu, mu2);
    const double b = fam.dpsi0_dmu2(mu, mu2);
    double e1 = 0, e2 = 0, total = 0;
    for (std::int64_t n = 0; n < 5000; ++n) {
        const double p = fam.pmf(n, mu, mu2);
        const double x = static_cast<double>(n);
        const double t = a * x + b * x * x - (n == 0 ? 1.0 : 0.0);
        e1 += t * p;
        e2 += t * t * p;
        total += p;
        if (total > 1.0 - 1e-13 && p * (x * x * x * x + 1.0) < 1e-18) break;
    }
    return e2 - e1 * e1;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// sup_x |F_hat(x) - Phi(x)| for a sample of statistics.
inline double ks_distance_to_normal(std::vector<double> zs) {
    std::sort(zs.begin(), zs.end());
    const double n = static_cast<double>(zs.size());
    double d = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double cdf = countgof::gof::normal_cdf(zs[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

// One-sample chi-squared GOF p-value of a sample against a known p.m.f.,
// binned by the fixed class rule at the law's true mean (df = #classes - 1,
// nothing estimated).
inline double gof_pvalue_vs_pmf(std::span<const std::int64_t> xs,
                                const std::function<double(std::int64_t)>& pmf,
                                double mean) {
    const auto partition = countgof::chisq::build_classes(mean, pmf);
    std::vector<std::int64_t> counts(partition.bins.size(), 0);
    for (const auto& [value, count] : countgof::gof::value_counts(xs))
        counts[partition.index_of(value)] += count;
    const double q = countgof::chisq::q_statistic(
        partition, counts, static_cast<std::int64_t>(xs.size()));
    const int df = static_cast<int>(partition.bins.size()) - 1;
    if (std::isinf(q)) return 0.0;
    return countgof::chisq::chi2_sf(q, df);
}

// Two-sample chi-squared homogeneity p-value. Bins are single values merged
// rightward until each pooled bin holds at least 10 observations.
inline double two_sample_chisq_pvalue(std::span<const std::int64_t> xs,
                                      std::span<const std::int64_t> ys) {
    std::int64_t hi = 0;
    for (const auto v : xs) hi = std::max(hi, v);
    for (const auto v : ys) hi = std::max(hi, v);
    std::vector<double> cx(static_cast<std::size_t>(hi) + 1, 0.0);
    std::vector<double> cy(cx.size(), 0.0);
    for (const auto v : xs) cx[static_cast<std::size_t>(v)] += 1;
    for (const auto v : ys) cy[static_cast<std::size_t>(v)] += 1;

    std::vector<std::pair<double, double>> bins;
    double ax = 0, ay = 0;
    for (std::size_t v = 0; v < cx.size(); ++v) {
        ax += cx[v];
        ay += cy[v];
        if (ax + ay >= 10.0) {
            bins.emplace_back(ax, ay);
            ax = ay = 0;
        }
    }
    if (ax + ay > 0) {
        if (bins.empty()) bins.emplace_back(ax, ay);
        else {
            bins.back().first += ax;
            bins.back().second += ay;
        }
    }
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    double q = 0;
    for (const auto& [ox, oy] : bins) {
        const double pooled = (ox + oy) / (nx + ny);
        const double ex = nx * pooled;
        const double ey = ny * pooled;
        q += (ox - ex) * (ox - ex) / ex + (oy - ey) * (oy - ey) / ey;
    }
    if (bins.size() < 2) return 1.0;
    return countgof::chisq::chi2_sf(q, static_cast<double>(bins.size() - 1));
}

}  // namespace testsupport
