#include "countgof/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "countgof/errors.hpp"
#include "countgof/specfun.hpp"

namespace countgof::models {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_poisson_pmf(std::int64_t n, double lambda) {
    if (lambda == 0.0) return n == 0 ? 0.0 : kNegInf;
    return static_cast<double>(n) * std::log(lambda) - lambda -
           specfun::log_factorial(n);
}

double log_choose(double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// ---------------------------------------------------------------------------
// Shifted Borel: total progeny of a Poisson(λ) branching process minus one,
// λ = μ/(1+μ).

class ShiftedBorelFamily final : public NullFamily1P {
public:
    std::string_view id() const override { return "shifted-borel"; }

    void check_mean(double mu) const override {
        if (!(mu >= 0.0))
            throw DomainError("shifted-borel: mean must satisfy mu >= 0");
    }

    double psi0(double mu) const override {
        check_mean(mu);
        return std::exp(-mu / (1.0 + mu));
    }

    double psi0_prime(double mu) const override {
        check_mean(mu);
        const double d = 1.0 + mu;
        return -std::exp(-mu / d) / (d * d);
    }

    double variance(double mu) const override {
        check_mean(mu);
        return mu * (1.0 + mu) * (1.0 + mu);
    }

    double natural_param(double mu) const override {
        check_mean(mu);
        return mu / (1.0 + mu);
    }

    double sigma2_closed_form(double mu) const override {
        check_mean(mu);
        const double lam = mu / (1.0 + mu);
        return std::exp(-2.0 * lam) *
               (std::exp(lam) - 1.0 - mu / ((1.0 + mu) * (1.0 + mu)));
    }

protected:
    double log_pmf_pos(std::int64_t n, double mu) const override {
        const double lam = mu / (1.0 + mu);
        const double m = static_cast<double>(n);
        return -lam * (m + 1.0) + m * std::log(lam * (m + 1.0)) -
               specfun::log_factorial(n + 1);
    }
};

// ---------------------------------------------------------------------------
// Geometric on ℕ with success probability p = 1/(μ+1).

class GeometricFamily final : public NullFamily1P {
public:
    std::string_view id() const override { return "geometric"; }

    void check_mean(double mu) const override {
        if (!(mu >= 0.0))
            throw DomainError("geometric: mean must satisfy mu >= 0");
    }

    double psi0(double mu) const override {
        check_mean(mu);
        return 1.0 / (mu + 1.0);
    }

    double psi0_prime(double mu) const override {
        check_mean(mu);
        return -1.0 / ((mu + 1.0) * (mu + 1.0));
    }

    double variance(double mu) const override {
        check_mean(mu);
        return mu * (1.0 + mu);
    }

    double natural_param(double mu) const override {
        check_mean(mu);
        return 1.0 / (mu + 1.0);
    }

    double sigma2_closed_form(double mu) const override {
        check_mean(mu);
        const double d = mu + 1.0;
        return mu * mu / (d * d * d);
    }

protected:
    double log_pmf_pos(std::int64_t n, double mu) const override {
        const double p = 1.0 / (mu + 1.0);
        return std::log(p) + static_cast<double>(n) * std::log1p(-p);
    }
};

// ---------------------------------------------------------------------------
// One-parameter Bell: pmf(n) = θ^n B_n e^{1-e^θ}/n! with θ e^θ = μ.
// Observed counts past the Bell table cap get p.m.f. 0; simulation cells sit
// far below the cap.

class Bell1Family final : public NullFamily1P {
public:
    std::string_view id() const override { return "bell1"; }

    void check_mean(double mu) const override {
        if (!(mu > 0.0))
            throw DomainError("bell1: mean must satisfy mu > 0");
    }

    double psi0(double mu) const override {
        check_mean(mu);
        return std::exp(1.0 - std::exp(specfun::lambert_w0(mu)));
    }

    double psi0_prime(double mu) const override {
        check_mean(mu);
        const double th = specfun::lambert_w0(mu);
        return -std::exp(1.0 - std::exp(th)) / (1.0 + th);
    }

    double variance(double mu) const override {
        check_mean(mu);
        return mu * (1.0 + specfun::lambert_w0(mu));
    }

    double natural_param(double mu) const override {
        check_mean(mu);
        return specfun::lambert_w0(mu);
    }

    double sigma2_closed_form(double mu) const override {
        check_mean(mu);
        const double th = specfun::lambert_w0(mu);
        const double p0 = std::exp(1.0 - std::exp(th));
        return p0 * (1.0 - th * std::exp(1.0 + th - std::exp(th)) / (1.0 + th) - p0);
    }

protected:
    double log_pmf_pos(std::int64_t n, double mu) const override {
        if (n > specfun::kRowCap) return kNegInf;
        const double th = specfun::lambert_w0(mu);
        return static_cast<double>(n) * std::log(th) +
               specfun::bell_number_log(static_cast<int>(n)).log_magnitude +
               (1.0 - std::exp(th)) - specfun::log_factorial(n);
    }
};

// ---------------------------------------------------------------------------
// Two-parameter Bell (Bell–Touchard): pmf(n) = θ^n T_n(α) e^{α(1-e^θ)}/n!,
// parametrized by the first two raw moments. Over-dispersion μ₂-μ²-μ > 0 is
// the moment domain; θ = (μ₂-μ²-μ)/μ and α = (μ²/D) e^{-D/μ} with D = μθ.

class Bell2Family final : public NullFamily2P {
public:
    std::string_view id() const override { return "bell2"; }

    bool in_moment_domain(double mu, double mu2) const override {
        return mu > 0.0 && mu2 - mu * mu - mu > 0.0;
    }

    void check_moments(double mu, double mu2) const override {
        if (!(mu > 0.0)) throw DomainError("bell2: mean must satisfy mu > 0");
        if (!(mu2 - mu * mu - mu > 0.0))
            throw DomainError(
                "bell2: moments must satisfy mu2 - mu^2 - mu > 0 (over-dispersion)");
    }

    double psi0(double mu, double mu2) const override {
        check_moments(mu, mu2);
        const double d = mu2 - mu * mu - mu;
        return std::exp(mu * mu / d * (std::exp(-d / mu) - 1.0));
    }

    double dpsi0_dmu(double mu, double mu2) const override {
        check_moments(mu, mu2);
        const double d = mu2 - mu * mu - mu;
        const double e = std::exp(-d / mu);
        return psi0(mu, mu2) * (mu * (2.0 * mu2 - mu) / (d * d) * (e - 1.0) +
                                (mu2 + mu * mu) * e / d);
    }

    double dpsi0_dmu2(double mu, double mu2) const override {
        check_moments(mu, mu2);
        const double d = mu2 - mu * mu - mu;
        const double e = std::exp(-d / mu);
        return psi0(mu, mu2) *
               (-mu * mu / (d * d) * (e - 1.0) - mu * e / d);
    }

    std::pair<double, double> natural_params(double mu, double mu2) const override {
        check_moments(mu, mu2);
        const double d = mu2 - mu * mu - mu;
        const double theta = d / mu;
        const double alpha = mu * mu / d * std::exp(-d / mu);
        return {alpha, theta};
    }

    std::pair<double, double> moments(double alpha, double theta) const override {
        if (!(alpha > 0.0) || !(theta > 0.0))
            throw DomainError("bell2: natural parameters must be positive");
        const double mu = alpha * theta * std::exp(theta);
        return {mu, mu * (mu + 1.0 + theta)};
    }

    double shat_simplified(double mu, double mu2) const override {
        check_moments(mu, mu2);
        const double p0 = psi0(mu, mu2);
        const double d = mu2 - mu * mu - mu;
        const double r = std::exp(-d / mu);
        return 2.0 * p0 * p0 *
               (mu * mu * (mu2 - mu) / (d * d) * (r - 1.0) + mu * mu * mu * r / d);
    }

protected:
    double log_pmf_pos(std::int64_t n, double mu, double mu2) const override {
        if (n > specfun::kRowCap) return kNegInf;
        const auto [alpha, theta] = natural_params(mu, mu2);
        return static_cast<double>(n) * std::log(theta) +
               specfun::touchard_log(static_cast<int>(n), alpha).log_magnitude +
               alpha * (1.0 - std::exp(theta)) - specfun::log_factorial(n);
    }
};

std::string format_params(std::string_view id, std::span<const double> params) {
    std::string out{id};
    out += '(';
    char buf[40];
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%g", params[i]);
        if (i) out += ',';
        out += buf;
    }
    out += ')';
    return out;
}

void require(bool cond, const char* msg) {
    if (!cond) throw DomainError(msg);
}

double as_whole(double x, const char* msg) {
    if (!(x >= 0.0) || x != std::floor(x)) throw DomainError(msg);
    return x;
}

}  // namespace

double NullFamily1P::pmf(std::int64_t n, double mu) const {
    check_mean(mu);
    if (n < 0) return 0.0;
    if (n == 0) return psi0(mu);
    return std::exp(log_pmf_pos(n, mu));
}

double NullFamily2P::pmf(std::int64_t n, double mu, double mu2) const {
    check_moments(mu, mu2);
    if (n < 0) return 0.0;
    if (n == 0) return psi0(mu, mu2);
    return std::exp(log_pmf_pos(n, mu, mu2));
}

const NullFamily1P& shifted_borel_family() {
    static const ShiftedBorelFamily fam;
    return fam;
}

const NullFamily1P& geometric_family() {
    static const GeometricFamily fam;
    return fam;
}

const NullFamily1P& bell1_family() {
    static const Bell1Family fam;
    return fam;
}

const NullFamily2P& bell2_family() {
    static const Bell2Family fam;
    return fam;
}

const NullFamily1P* find_family_1p(std::string_view id) {
    if (id == "shifted-borel") return &shifted_borel_family();
    if (id == "geometric") return &geometric_family();
    if (id == "bell1") return &bell1_family();
    return nullptr;
}

const NullFamily2P* find_family_2p(std::string_view id) {
    if (id == "bell2") return &bell2_family();
    return nullptr;
}

// ---------------------------------------------------------------------------
// AltDistribution and the catalog of alternative laws.

AltDistribution::AltDistribution(std::string label, double mean,
                                 std::optional<double> variance,
                                 std::function<double(std::int64_t)> pmf)
    : label_(std::move(label)),
      mean_(mean),
      variance_(variance),
      pmf_(std::move(pmf)) {}

double AltDistribution::second_moment() const {
    if (!variance_)
        throw DomainError(label_ + ": variance is not available");
    return *variance_ + mean_ * mean_;
}

AltDistribution alt_catalog(std::string_view id, std::span<const double> params) {
    const auto arity = [&](std::size_t k) {
        if (params.size() != k)
            throw std::invalid_argument(std::string(id) + ": expected " +
                                        std::to_string(k) + " parameter(s)");
    };
    const std::string label = format_params(id, params);

    if (id == "poisson") {
        arity(1);
        const double lam = params[0];
        require(lam > 0.0, "poisson: lambda must be > 0");
        return {label, lam, lam,
                [lam](std::int64_t n) { return std::exp(log_poisson_pmf(n, lam)); }};
    }
    if (id == "mix-poisson") {
        arity(2);
        const double l1 = params[0], l2 = params[1];
        require(l1 > 0.0 && l2 > 0.0, "mix-poisson: lambdas must be > 0");
        const double mean = 0.5 * (l1 + l2);
        const double m2 = 0.5 * (l1 + l1 * l1) + 0.5 * (l2 + l2 * l2);
        return {label, mean, m2 - mean * mean, [l1, l2](std::int64_t n) {
                    return 0.5 * std::exp(log_poisson_pmf(n, l1)) +
                           0.5 * std::exp(log_poisson_pmf(n, l2));
                }};
    }
    if (id == "binomial") {
        arity(2);
        const double k = as_whole(params[0], "binomial: k must be a whole number");
        const double p = params[1];
        require(k >= 1.0 && p >= 0.0 && p <= 1.0,
                "binomial: need k >= 1 and p in [0,1]");
        return {label, k * p, k * p * (1.0 - p), [k, p](std::int64_t n) {
                    const double m = static_cast<double>(n);
                    if (m > k || n < 0) return 0.0;
                    if (p == 0.0) return n == 0 ? 1.0 : 0.0;
                    if (p == 1.0) return m == k ? 1.0 : 0.0;
                    return std::exp(log_choose(k, m) + m * std::log(p) +
                                    (k - m) * std::log1p(-p));
                }};
    }
    if (id == "neg-binomial") {
        arity(2);
        const double k = params[0], p = params[1];
        require(k > 0.0 && p > 0.0 && p <= 1.0,
                "neg-binomial: need k > 0 and p in (0,1]");
        const double mean = k * (1.0 - p) / p;
        return {label, mean, k * (1.0 - p) / (p * p), [k, p](std::int64_t n) {
                    if (p == 1.0) return n == 0 ? 1.0 : 0.0;
                    const double m = static_cast<double>(n);
                    return std::exp(std::lgamma(m + k) - std::lgamma(k) -
                                    specfun::log_factorial(n) + k * std::log(p) +
                                    m * std::log1p(-p));
                }};
    }
    if (id == "gen-hermite") {
        arity(3);
        const double a = params[0], b = params[1];
        const double k = as_whole(params[2], "gen-hermite: k must be a whole number");
        require(a >= 0.0 && b >= 0.0 && k >= 1.0,
                "gen-hermite: need a,b >= 0 and k >= 1");
        const auto ki = static_cast<std::int64_t>(k);
        return {label, a + k * b, a + k * k * b, [a, b, ki](std::int64_t n) {
                    double acc = 0.0;
                    for (std::int64_t j = 0; j * ki <= n; ++j)
                        acc += std::exp(log_poisson_pmf(n - j * ki, a) +
                                        log_poisson_pmf(j, b));
                    return acc;
                }};
    }
    if (id == "discrete-uniform") {
        arity(1);
        const double nu = as_whole(params[0], "discrete-uniform: nu must be a whole number");
        const double m = nu / 2.0;
        const double var = ((nu + 1.0) * (nu + 1.0) - 1.0) / 12.0;
        const auto top = static_cast<std::int64_t>(nu);
        return {label, m, var, [top](std::int64_t n) {
                    return n >= 0 && n <= top ? 1.0 / static_cast<double>(top + 1) : 0.0;
                }};
    }
    if (id == "log-series") {
        arity(1);
        const double th = params[0];
        require(th > 0.0 && th < 1.0, "log-series: theta must be in (0,1)");
        const double l = std::log1p(-th);
        const double mean = -th / ((1.0 - th) * l);
        const double var = -th * (th + l) / ((1.0 - th) * (1.0 - th) * l * l);
        return {label, mean, var, [th, l](std::int64_t n) {
                    if (n < 1) return 0.0;
                    return -std::exp(static_cast<double>(n) * std::log(th)) /
                           (static_cast<double>(n) * l);
                }};
    }
    if (id == "gen-poisson") {
        arity(2);
        const double l1 = params[0], l2 = params[1];
        require(l1 > 0.0 && l2 >= 0.0 && l2 < 1.0,
                "gen-poisson: need lambda1 > 0 and lambda2 in [0,1)");
        const double mean = l1 / (1.0 - l2);
        const double var = l1 / ((1.0 - l2) * (1.0 - l2) * (1.0 - l2));
        return {label, mean, var, [l1, l2](std::int64_t n) {
                    const double m = static_cast<double>(n);
                    return std::exp(std::log(l1) + (m - 1.0) * std::log(l1 + m * l2) -
                                    l1 - m * l2 - specfun::log_factorial(n));
                }};
    }

    // Zero-inflated laws: last parameter is the inflation weight pi.
    const auto inflate = [&](AltDistribution base, double pi) {
        require(pi >= 0.0 && pi <= 1.0, "zero-inflated: pi must be in [0,1]");
        const double mean = (1.0 - pi) * base.mean();
        const double m2 = (1.0 - pi) * base.second_moment();
        return AltDistribution{
            label, mean, m2 - mean * mean,
            [base = std::move(base), pi](std::int64_t n) {
                const double p = (1.0 - pi) * base.pmf(n);
                return n == 0 ? pi + p : p;
            }};
    };
    if (id == "zi-binomial") {
        arity(3);
        return inflate(alt_catalog("binomial", params.first(2)), params[2]);
    }
    if (id == "zi-neg-binomial") {
        arity(3);
        return inflate(alt_catalog("neg-binomial", params.first(2)), params[2]);
    }
    if (id == "zip") {
        arity(2);
        return inflate(alt_catalog("poisson", params.first(1)), params[1]);
    }

    throw std::invalid_argument("unknown alternative id: " + std::string(id));
}

AltDistribution alt_from_spec(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view id = text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view tok = rest.substr(0, comma);
            double value = 0;
            const auto [ptr, ec] =
                std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw std::invalid_argument("bad parameter '" + std::string(tok) +
                                            "' in alternative spec '" +
                                            std::string(text) + "'");
            params.push_back(value);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    return alt_catalog(id, params);
}

// ---------------------------------------------------------------------------
// Inversion sampling.

namespace {
constexpr double kInitialCoverage = 1.0 - 1e-12;
constexpr int kStallLimit = 4096;
}  // namespace

InversionSampler::InversionSampler(std::function<double(std::int64_t)> pmf)
    : pmf_(std::move(pmf)) {
    extend_to(kInitialCoverage);
}

InversionSampler::InversionSampler(const AltDistribution& dist)
    : InversionSampler([dist](std::int64_t n) { return dist.pmf(n); }) {}

InversionSampler::InversionSampler(const NullFamily1P& fam, double mu)
    : InversionSampler([&fam, mu](std::int64_t n) { return fam.pmf(n, mu); }) {}

InversionSampler::InversionSampler(const NullFamily2P& fam, double mu, double mu2)
    : InversionSampler(
          [&fam, mu, mu2](std::int64_t n) { return fam.pmf(n, mu, mu2); }) {}

void InversionSampler::extend_to(double target) {
    double cum = cdf_.empty() ? 0.0 : cdf_.back();
    int stall = 0;
    while (!exhausted_ && cum < target) {
        const double p = pmf_(static_cast<std::int64_t>(cdf_.size()));
        const double next = cum + p;
        stall = next == cum ? stall + 1 : 0;
        cum = next;
        cdf_.push_back(cum);
        if (stall >= kStallLimit) exhausted_ = true;
    }
}

std::int64_t InversionSampler::draw(CounterRng& rng) {
    const double u = rng.next_double();
    if (u > cdf_.back()) extend_to(std::nextafter(u, 2.0));
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<std::int64_t>(cdf_.size()) - 1;
    return static_cast<std::int64_t>(it - cdf_.begin());
}

std::vector<std::int64_t> sample_iid(const NullFamily1P& fam, double mu,
                                     std::size_t n, CounterRng& rng) {
    InversionSampler sampler(fam, mu);
    std::vector<std::int64_t> out(n);
    for (auto& x : out) x = sampler.draw(rng);
    return out;
}

std::vector<std::int64_t> sample_iid(const NullFamily2P& fam, double mu,
                                     double mu2, std::size_t n, CounterRng& rng) {
    InversionSampler sampler(fam, mu, mu2);
    std::vector<std::int64_t> out(n);
    for (auto& x : out) x = sampler.draw(rng);
    return out;
}

std::vector<std::int64_t> sample_iid(const AltDistribution& dist, std::size_t n,
                                     CounterRng& rng) {
    InversionSampler sampler(dist);
    std::vector<std::int64_t> out(n);
    for (auto& x : out) x = sampler.draw(rng);
    return out;
}

std::int64_t sample_poisson_small(CounterRng& rng, double lambda) {
    if (!(lambda >= 0.0) || lambda > 30.0)
        throw DomainError("sample_poisson_small: lambda must be in [0, 30]");
    if (lambda == 0.0) return 0;
    const double floor = std::exp(-lambda);
    std::int64_t k = 0;
    double prod = rng.next_double();
    while (prod > floor) {
        ++k;
        prod *= rng.next_double();
    }
    return k;
}

std::int64_t sample_borel_branching(CounterRng& rng, double mu) {
    shifted_borel_family().check_mean(mu);
    const double lam = mu / (1.0 + mu);
    std::int64_t pending = 1;
    std::int64_t total = 1;
    while (pending > 0 && total < 10'000'000) {
        const std::int64_t children = sample_poisson_small(rng, lam);
        pending += children - 1;
        total += children;
    }
    return total - 1;
}

}  // namespace countgof::models
