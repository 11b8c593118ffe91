#pragma once

#include <cstdint>
#include <vector>

namespace countgof::specfun {

// A nonnegative quantity carried as its natural log. Bell numbers, Touchard
// values and factorials overflow doubles long before the row cap (B_200
// already does), so everything downstream assembles p.m.f.s in log space and
// exponentiates once.
struct LogValue {
    double log_magnitude;

    double value() const;
};

// Largest n for which Stirling/Bell/Touchard rows are tabulated.
inline constexpr int kRowCap = 400;

// Largest n for which a full Stirling row fits in 64 bits (B_26 > 2^64).
inline constexpr int kExactRowCap = 25;

// Principal branch of the inverse of w ↦ w·e^w, nonnegative arguments only.
// Halley iteration from a log-based initial guess; |w·e^w − x| stays within
// 1e-12·max(1,x) over [0, 1e8] and the map is monotone in x.
double lambert_w0(double x);

// log(n!)
double log_factorial(std::int64_t n);

// log of the n-th Bell number (number of partitions of a set of size n).
LogValue bell_number_log(int n);

// log of the Touchard polynomial T_n(alpha) = Σ_j alpha^j S(n,j).
// T_n(1) equals the n-th Bell number.
LogValue touchard_log(int n, double alpha);

// Exact row S(n, 0..n) of Stirling numbers of the second kind, n ≤ 25.
std::vector<std::uint64_t> stirling2_row(int n);

// Row of log S(n, 0..n); entries that are zero come back as -inf.
// Rows are built once up to kRowCap and shared; n above the cap throws
// CapacityError.
const std::vector<double>& stirling2_log_row(int n);

// log(a + b) given log a and log b, tolerant of -inf.
double log_add_exp(double log_a, double log_b);

}  // namespace countgof::specfun
