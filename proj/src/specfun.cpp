#include "countgof/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "countgof/errors.hpp"

namespace countgof::specfun {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// All log-scale rows up to kRowCap, built on first use. Row n has n+1
// entries log S(n, j). ~0.6 MB total.
const std::vector<std::vector<double>>& all_log_rows() {
    static const std::vector<std::vector<double>> rows = [] {
        std::vector<std::vector<double>> r(kRowCap + 1);
        r[0] = {0.0};  // S(0,0) = 1
        for (int n = 1; n <= kRowCap; ++n) {
            const auto& prev = r[n - 1];
            auto& cur = r[n];
            cur.assign(static_cast<std::size_t>(n) + 1, kNegInf);
            for (int j = 1; j <= n; ++j) {
                const double keep =
                    j < n ? std::log(static_cast<double>(j)) + prev[j] : kNegInf;
                const double grow = prev[j - 1];
                cur[j] = log_add_exp(keep, grow);
            }
        }
        return r;
    }();
    return rows;
}

const std::vector<double>& bell_log_table() {
    static const std::vector<double> bells = [] {
        std::vector<double> b(kRowCap + 1);
        for (int n = 0; n <= kRowCap; ++n) {
            const auto& row = all_log_rows()[static_cast<std::size_t>(n)];
            double acc = kNegInf;
            for (double lv : row) acc = log_add_exp(acc, lv);
            b[static_cast<std::size_t>(n)] = acc;
        }
        return b;
    }();
    return bells;
}

}  // namespace

double LogValue::value() const { return std::exp(log_magnitude); }

double log_add_exp(double log_a, double log_b) {
    if (log_a == kNegInf) return log_b;
    if (log_b == kNegInf) return log_a;
    const double hi = std::max(log_a, log_b);
    const double lo = std::min(log_a, log_b);
    return hi + std::log1p(std::exp(lo - hi));
}

double lambert_w0(double x) {
    if (std::isnan(x) || x < 0.0)
        throw DomainError("lambert_w0: argument must be >= 0");
    if (x == 0.0) return 0.0;

    double w;
    if (x < 1.0) {
        w = x * (1.0 - x);  // w = x - x^2 + O(x^3)
    } else if (x < std::exp(1.0)) {
        w = x / std::exp(1.0);
    } else {
        const double l = std::log(x);
        w = l - std::log(l);
    }
    for (int iter = 0; iter < 60; ++iter) {
        const double e = std::exp(w);
        const double f = w * e - x;
        // Halley step for f(w) = w e^w - x
        const double step =
            f / (e * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0)));
        w -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

double log_factorial(std::int64_t n) {
    if (n < 0) throw DomainError("log_factorial: argument must be >= 0");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

LogValue bell_number_log(int n) {
    if (n < 0) throw DomainError("bell_number_log: n must be >= 0");
    if (n > kRowCap)
        throw CapacityError("bell_number_log: n exceeds table cap " +
                            std::to_string(kRowCap));
    return LogValue{bell_log_table()[static_cast<std::size_t>(n)]};
}

LogValue touchard_log(int n, double alpha) {
    if (n < 0) throw DomainError("touchard_log: n must be >= 0");
    if (!(alpha > 0.0)) throw DomainError("touchard_log: alpha must be > 0");
    const auto& row = stirling2_log_row(n);
    const double log_alpha = std::log(alpha);
    double acc = kNegInf;
    for (int j = 0; j <= n; ++j)
        acc = log_add_exp(acc, static_cast<double>(j) * log_alpha +
                                   row[static_cast<std::size_t>(j)]);
    return LogValue{acc};
}

std::vector<std::uint64_t> stirling2_row(int n) {
    if (n < 0) throw DomainError("stirling2_row: n must be >= 0");
    if (n > kExactRowCap)
        throw CapacityError("stirling2_row: exact rows overflow 64 bits past n = " +
                            std::to_string(kExactRowCap));
    std::vector<std::uint64_t> row{1};  // S(0,0)
    for (int m = 1; m <= n; ++m) {
        std::vector<std::uint64_t> next(static_cast<std::size_t>(m) + 1, 0);
        for (int j = 1; j <= m; ++j) {
            const std::uint64_t keep =
                j < m ? static_cast<std::uint64_t>(j) * row[static_cast<std::size_t>(j)]
                      : 0;
            next[static_cast<std::size_t>(j)] =
                keep + row[static_cast<std::size_t>(j - 1)];
        }
        row = std::move(next);
    }
    return row;
}

const std::vector<double>& stirling2_log_row(int n) {
    if (n < 0) throw DomainError("stirling2_log_row: n must be >= 0");
    if (n > kRowCap)
        throw CapacityError("stirling2_log_row: n exceeds table cap " +
                            std::to_string(kRowCap));
    return all_log_rows()[static_cast<std::size_t>(n)];
}

}  // namespace countgof::specfun
