#pragma once

// Two negative results, made executable.
//
// The first is the worst-case realization on which the sequential-update sum
// of a non-smooth payoff diverges: both components follow the same pure-jump
// path, jumping by 1/l at time 2 - 1/l, and the payoff is the absolute
// difference.  Updating the first factor alone opens a wedge of width 1/l at
// every jump, so the first-factor sum over the first n jumps is the harmonic
// number H_n, which grows without bound.  The sum is accumulated in exact
// rational arithmetic and rounded once at the end.
//
// The second is the instability of the limit decomposition under evaluation
// delays: reading the integrand at the right endpoint instead of the left
// shifts a factor's contribution by the full quadratic variation, which does
// not vanish under refinement.

#include <cstdint>
#include <stdexcept>

#include <gmp.h>

#include "simulate.hpp"

namespace seqdec {

namespace detail {

// Minimal RAII wrapper over a GMP rational, just enough for exact sums.
class Rational {
public:
    Rational() { mpq_init(q_); }
    Rational(long num, unsigned long den) {
        mpq_init(q_);
        mpq_set_si(q_, num, den);
        mpq_canonicalize(q_);
    }
    Rational(const Rational& other) {
        mpq_init(q_);
        mpq_set(q_, other.q_);
    }
    Rational(Rational&& other) noexcept {
        mpq_init(q_);
        mpq_swap(q_, other.q_);
    }
    Rational& operator=(Rational other) noexcept {
        mpq_swap(q_, other.q_);
        return *this;
    }
    ~Rational() { mpq_clear(q_); }

    Rational& operator+=(const Rational& other) {
        mpq_add(q_, q_, other.q_);
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) {
        mpq_sub(a.q_, a.q_, b.q_);
        return a;
    }
    friend Rational abs(Rational a) {
        mpq_abs(a.q_, a.q_);
        return a;
    }
    bool operator==(const Rational& other) const { return mpq_equal(q_, other.q_) != 0; }
    double to_double() const { return mpq_get_d(q_); }

private:
    mpq_t q_;
};

// What the first factor's update contributes at the l-th jump: both
// components sit at the common level H_{l-1}, the first moves to H_l, and the
// absolute-difference payoff registers the full wedge |H_l - H_{l-1}| = 1/l.
inline Rational harmonic_step_increment(long l) { return abs(Rational(1, static_cast<unsigned long>(l))); }

// Balanced-tree association of the step increments; exact in rationals, so
// the association order cannot change the value, only the running time.
inline Rational harmonic_partial_sum(long lo, long hi) {
    if (lo == hi) return harmonic_step_increment(lo);
    const long mid = lo + (hi - lo) / 2;
    return harmonic_partial_sum(lo, mid) + harmonic_partial_sum(mid + 1, hi);
}

} // namespace detail

// Time of the l-th jump of the worst-case realization.
inline double harmonic_jump_time(long l) { return 2.0 - 1.0 / static_cast<double>(l); }

// First-factor sequential-update sum over a partition containing the first n
// jump times; equals H_n.  Diverges like log n as the partition refines, so
// no limit decomposition exists for this payoff.
inline double harmonic_divergence(long n) {
    if (n < 1) throw std::invalid_argument("harmonic_divergence: n must be at least 1");
    return detail::harmonic_partial_sum(1, n).to_double();
}

struct StabilityGap {
    double right_sum = 0.0;  // integrand read at the right endpoint (delayed evaluation)
    double left_sum = 0.0;   // integrand read at the left endpoint (the Ito convention)
    double gap = 0.0;        // their difference in expectation: the quadratic variation
};

// One Brownian path, and the first-factor sums under the two evaluation
// conventions.  The gap accumulates the squared increments directly, so it is
// a nonnegative estimate of [B,B](T) = T no matter how the two sums round.
inline StabilityGap stability_gap(int n, double horizon, std::uint64_t seed) {
    const Path path = simulate_brownian(n, horizon, seed);
    const auto& b = path.values[0];
    StabilityGap out;
    for (int l = 1; l <= n; ++l) {
        const double db = b[l] - b[l - 1];
        out.right_sum += b[l] * db;
        out.left_sum += b[l - 1] * db;
        out.gap += db * db;
    }
    return out;
}

} // namespace seqdec
