#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "countgof/errors.hpp"
#include "countgof/gof.hpp"
#include "countgof/models.hpp"
#include "support.hpp"

using namespace countgof;
using namespace countgof::gof;
using namespace countgof::models;

namespace {

const double kE = std::exp(1.0);

std::vector<std::int64_t> concat(std::vector<std::int64_t> a,
                                 const std::vector<std::int64_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::int64_t> repeated(std::int64_t value, std::size_t times) {
    return std::vector<std::int64_t>(times, value);
}

}  // namespace

TEST_SUITE_BEGIN("gof");

TEST_CASE("summarize frozen examples and edge cases") {
    const auto s1 = summarize(std::vector<std::int64_t>{0, 0, 0});
    CHECK(s1.n == 3);
    CHECK(s1.mu_hat == 0.0);
    CHECK(s1.mu2_hat == 0.0);
    CHECK(s1.p0_hat == 1.0);

    const auto s2 = summarize(std::vector<std::int64_t>{0, 1, 2, 3});
    CHECK(s2.n == 4);
    CHECK(s2.mu_hat == 1.5);
    CHECK(s2.mu2_hat == 3.5);
    CHECK(s2.p0_hat == 0.25);

    const auto s3 = summarize(std::vector<std::int64_t>{5});
    CHECK(s3.n == 1);
    CHECK(s3.mu_hat == 5.0);
    CHECK(s3.mu2_hat == 25.0);
    CHECK(s3.p0_hat == 0.0);

    CHECK_THROWS_AS(summarize(std::vector<std::int64_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(summarize(std::vector<std::int64_t>{1, -1}), DomainError);
}

TEST_CASE("summary invariants on random samples") {
    std::mt19937 gen(99);
    std::poisson_distribution<std::int64_t> pois(3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> xs(200);
        for (auto& x : xs) x = pois(gen);
        const auto s = summarize(xs);
        CHECK(s.mu2_hat >= s.mu_hat * s.mu_hat);  // Cauchy–Schwarz
        const double count0 = s.p0_hat * static_cast<double>(s.n);
        CHECK(count0 == doctest::Approx(std::round(count0)));
        CHECK((s.mu_hat == 0.0) == (s.p0_hat == 1.0));
    }
}

TEST_CASE("t0_one_param frozen examples") {
    const auto& geo = geometric_family();
    CHECK(t0_one_param(geo, {100, 1.0, 0.0, 0.5}) == doctest::Approx(0.0));
    CHECK(t0_one_param(geo, {100, 1.0, 0.0, 0.4}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    const auto& borel = shifted_borel_family();
    CHECK(t0_one_param(borel, {25, 1.0, 0.0, 0.6}) ==
          doctest::Approx(0.03265329856316723).epsilon(1e-10));
}

TEST_CASE("sigma2_one_param frozen examples and small-mean limit") {
    const auto& geo = geometric_family();
    CHECK(sigma2_one_param(geo, 1.0) == doctest::Approx(0.125).epsilon(1e-12));
    const auto& borel = shifted_borel_family();
    CHECK(sigma2_one_param(borel, 1.0) ==
          doctest::Approx(0.14668135824833053).epsilon(1e-12));
    for (const auto* fam : {&geo, &borel})
        CHECK(std::abs(sigma2_one_param(*fam, 1e-8)) < 1e-6);
    CHECK(std::abs(sigma2_one_param(bell1_family(), 1e-8)) < 1e-6);
}

TEST_CASE("generic sigma2 assembly equals the printed closed forms") {
    for (const double mu : {0.5, 1.0, 2.0, 5.0, 15.0}) {
        for (const auto* fam :
             {&shifted_borel_family(), &geometric_family(), &bell1_family()}) {
            const double generic = sigma2_one_param(*fam, mu);
            const double closed = fam->sigma2_closed_form(mu);
            CHECK(generic == doctest::Approx(closed).epsilon(1e-12));
        }
    }
}

TEST_CASE("sigma2 equals Var[psi0' X - I0] by pmf summation") {
    for (const double mu : {0.5, 1.0, 2.0, 5.0}) {
        for (const auto* fam :
             {&shifted_borel_family(), &geometric_family(), &bell1_family()}) {
            CHECK(sigma2_one_param(*fam, mu) ==
                  doctest::Approx(testsupport::sigma2_by_pmf_sum(*fam, mu))
                      .epsilon(1e-8));
        }
    }
}

TEST_CASE("z_test_one_param frozen examples") {
    const auto& geo = geometric_family();
    // mu_hat = 1, p0_hat = 0.5: 50 zeros and 50 twos
    const auto balanced = concat(repeated(0, 50), repeated(2, 50));
    const auto r0 = z_test_one_param(geo, balanced, 0.05);
    CHECK(r0.statistic == doctest::Approx(0.0));
    CHECK(r0.p_value == doctest::Approx(1.0));
    CHECK_FALSE(r0.reject);

    // mu_hat = 1, p0_hat = 0.4: 40 zeros, 40 ones, 20 threes
    const auto shifted =
        concat(concat(repeated(0, 40), repeated(1, 40)), repeated(3, 20));
    const auto r1 = z_test_one_param(geo, shifted, 0.05);
    CHECK(r1.statistic == doctest::Approx(2.82842712474619).epsilon(1e-12));
    CHECK(r1.p_value == doctest::Approx(0.0046777349810472706).epsilon(1e-10));
    CHECK(r1.reject);

    CHECK_THROWS_AS(z_test_one_param(geo, repeated(0, 30), 0.05),
                    DegenerateSampleError);
    CHECK_THROWS_AS(z_test_one_param(geo, balanced, 1.5), std::invalid_argument);
    // bell1 boundary: an all-zero sample is degenerate, not a domain error
    CHECK_THROWS_AS(z_test_one_param(bell1_family(), repeated(0, 30), 0.05),
                    DegenerateSampleError);
}

TEST_CASE("two-parameter statistic pieces") {
    const auto& fam = bell2_family();
    const double mu2 = kE * (kE + 2.0);

    const double psi0 = fam.psi0(kE, mu2);
    CHECK(t0_two_param(fam, {4, kE, mu2, psi0}) == doctest::Approx(0.0));
    CHECK(t0_two_param(fam, {100, kE, mu2, 0.25}) ==
          doctest::Approx(-0.7062592126598279).epsilon(1e-10));
    CHECK_THROWS_AS(t0_two_param(fam, {100, 1.0, 1.5, 0.2}), DomainError);

    // frozen two-point sample variance: W in {0, a+b} with two of each
    const double a = 0.7, b = -0.2;
    const std::vector<std::int64_t> xs{0, 0, 1, 1};
    CHECK(vhat_weighted(xs, a, b) ==
          doctest::Approx((a + b) * (a + b) / 3.0).epsilon(1e-12));
    CHECK(vhat_weighted(repeated(4, 10), 1.0, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(vhat_weighted(repeated(1, 1), 1.0, 1.0), std::invalid_argument);

    // vhat is nonnegative on random samples
    std::mt19937 gen(5);
    std::poisson_distribution<std::int64_t> pois(2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::int64_t> ys(50);
        for (auto& y : ys) y = pois(gen);
        CHECK(vhat_weighted(ys, -0.3, 0.05) >= 0.0);
    }
}

TEST_CASE("z_test_two_param under H0 and on bad samples") {
    const auto& fam = bell2_family();
    const auto [mu, mu2] = fam.moments(1.0, 1.0);
    CounterRng rng(4242, 0, 0);
    const auto xs = sample_iid(fam, mu, mu2, 5000, rng);
    const auto report = z_test_two_param(fam, xs, 0.05);
    CHECK(std::abs(report.statistic) < 4.0);

    CHECK_THROWS_AS(z_test_two_param(fam, repeated(1, 50), 0.05), DomainError);
    CHECK_THROWS_AS(z_test_two_param(fam, repeated(0, 50), 0.05),
                    DegenerateSampleError);
}

TEST_CASE("bell2 shat: r_n route equals the partials route") {
    const auto& fam = bell2_family();
    for (double a = 0.3; a <= 1.31; a += 0.2) {
        for (double t = 0.3; t <= 1.31; t += 0.2) {
            const auto [mu, mu2] = fam.moments(a, t);
            const double generic = 2.0 *
                                   (fam.dpsi0_dmu(mu, mu2) * mu +
                                    fam.dpsi0_dmu2(mu, mu2) * mu2) *
                                   fam.psi0(mu, mu2);
            CHECK(fam.shat_simplified(mu, mu2) ==
                  doctest::Approx(generic).epsilon(1e-10));
        }
    }
}

TEST_CASE("bell2 sigma2 assembly equals Var[aX+bX^2-I0] by pmf summation") {
    const auto& fam = bell2_family();
    for (const auto& [a, t] : std::vector<std::pair<double, double>>{
             {0.3, 0.5}, {1.0, 1.0}, {1.3, 0.7}}) {
        const auto [mu, mu2] = fam.moments(a, t);
        // population version of the sigma2 used by the test, with the exact
        // v(mu, mu2) in place of vhat
        const double p0 = fam.psi0(mu, mu2);
        const double w1 = fam.dpsi0_dmu(mu, mu2);
        const double w2 = fam.dpsi0_dmu2(mu, mu2);
        double e1 = 0, e2 = 0;
        for (std::int64_t n = 0; n < 400; ++n) {
            const double p = fam.pmf(n, mu, mu2);
            const double x = static_cast<double>(n);
            const double wv = w1 * x + w2 * x * x;
            e1 += wv * p;
            e2 += wv * wv * p;
        }
        const double v = e2 - e1 * e1;
        const double assembled = v + 2.0 * (w1 * mu + w2 * mu2) * p0 + p0 * (1.0 - p0);
        CHECK(assembled ==
              doctest::Approx(testsupport::sigma2_by_pmf_sum_2p(fam, mu, mu2))
                  .epsilon(1e-8));
    }
}

TEST_CASE("permutation invariance is bit-exact") {
    const auto& geo = geometric_family();
    const auto& bell2 = bell2_family();
    std::mt19937 gen(17);
    std::vector<std::int64_t> xs;
    // over-dispersed data keeps the sample inside bell2's moment domain
    std::negative_binomial_distribution<std::int64_t> nb(3, 0.4);
    for (int i = 0; i < 200; ++i) xs.push_back(nb(gen));

    const auto base_z = z_test_one_param(geo, xs, 0.05);
    const auto base_z2 = z_test_two_param(bell2, xs, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(xs.begin(), xs.end(), gen);
        const auto rz = z_test_one_param(geo, xs, 0.05);
        CHECK(rz.statistic == base_z.statistic);
        CHECK(rz.raw_numerator == base_z.raw_numerator);
        CHECK(rz.sigma_hat == base_z.sigma_hat);
        CHECK(rz.p_value == base_z.p_value);
        const auto r2 = z_test_two_param(bell2, xs, 0.05);
        CHECK(r2.statistic == base_z2.statistic);
        CHECK(r2.sigma_hat == base_z2.sigma_hat);
    }
}

TEST_CASE("l1_discrepancy identities") {
    const auto& geo = geometric_family();
    CHECK(l1_discrepancy(geo, 1.0, geo.psi0(1.0)) == doctest::Approx(0.0));
    CHECK(l1_discrepancy(geo, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(l1_discrepancy(geo, 1.0, 1.5), std::invalid_argument);

    // perturbation f = g·w: the distance is 1 - w(0)
    for (const double p : {0.5, 0.9}) {
        const double p0_true = geo.psi0(1.0) * p;  // Bernoulli(p) pgf at 0 is p
        CHECK(l1_discrepancy(geo, 1.0, p0_true) ==
              doctest::Approx(1.0 - p).epsilon(1e-12));
    }
    const double w0 = std::pow(0.75, 4);  // Binomial(4, 0.25) pgf at 0
    CHECK(l1_discrepancy(geo, 1.0, geo.psi0(1.0) * w0) ==
          doctest::Approx(1.0 - w0).epsilon(1e-12));
}

TEST_CASE("perturbation and thinning give D_mu a constant sign") {
    // f = g_mu * w  =>  (f/g)' = w' >= 0; thinning gives f(s) = g(1-a+as)
    // with (f/g)' <= 0 for the geometric family. Checked on a grid with
    // central differences of the pgf ratio.
    const double mu = 1.0;
    const auto& geo = geometric_family();
    const auto geo_pgf = [&](double s) {
        const double p = 1.0 / (mu + 1.0);
        return p / (1.0 - (1.0 - p) * s);
    };
    const auto bern_pgf = [](double s) { return 0.4 + 0.6 * s; };
    const double athin = 0.7;
    const auto thinned_pgf = [&](double s) { return geo_pgf(1.0 - athin + athin * s); };

    const double h = 1e-6;
    for (int i = 1; i < 100; ++i) {
        const double s = i / 100.0;
        const auto ratio_pert = [&](double t) {
            return geo_pgf(t) * bern_pgf(t) / geo_pgf(t);
        };
        const auto ratio_thin = [&](double t) { return thinned_pgf(t) / geo_pgf(t); };
        CHECK(testsupport::central_difference(ratio_pert, s, h) >= -1e-9);
        CHECK(testsupport::central_difference(ratio_thin, s, h) <= 1e-9);
    }
}

TEST_CASE("consistency direction: |Z_n| grows with n off the null") {
    // Poisson(1) data tested against the geometric family
    const auto& geo = geometric_family();
    const auto median_abs_z = [&](std::int64_t n, std::uint64_t cell) {
        std::vector<double> zs;
        const auto pois = alt_catalog("poisson", std::vector<double>{1});
        for (int rep = 0; rep < 1000; ++rep) {
            CounterRng rng(909, cell, static_cast<std::uint64_t>(rep));
            const auto xs = sample_iid(pois, static_cast<std::size_t>(n), rng);
            zs.push_back(std::abs(z_test_one_param(geo, xs, 0.05).statistic));
        }
        std::nth_element(zs.begin(), zs.begin() + 500, zs.end());
        return zs[500];
    };
    CHECK(median_abs_z(200, 0) > median_abs_z(50, 1));
}

TEST_CASE("normal_cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(normal_cdf(5.0) == doctest::Approx(0.9999997133484281).epsilon(1e-12));
}

TEST_SUITE_END();
