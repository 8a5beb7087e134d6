#pragma once

// Ready-made payoffs and model bundles for the four worked applications:
// a two-stock product, its value-at-risk scaling, a Black-Scholes call with
// calendar time as an explicit factor, and a foreign zero-coupon bond with
// FX, interest-rate, credit-spread, and time factors.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "decomposition.hpp"
#include "limit_decomp.hpp"
#include "normal.hpp"
#include "path.hpp"
#include "payoff.hpp"
#include "simulate.hpp"

namespace seqdec {

// ======================================================================
// Stock product and its quantile scaling
// ======================================================================

inline SmoothPayoff stock_product_payoff() { return product_payoff(2); }

// lambda-quantile of exp(a + b Z), Z standard normal.
inline double lognormal_quantile(double location, double scale, double lambda) {
    if (!(scale > 0.0))
        throw std::invalid_argument("lognormal_quantile: scale must be positive");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("lognormal_quantile: lambda must lie in (0, 1)");
    return std::exp(location + scale * norm_cdf_inverse(lambda));
}

// Attribution of the rolling lambda-quantile of the product over a window of
// length `horizon`.  The quantile is the product price times a constant
// weight, so its decomposition is that exact scalar multiple of the product
// decomposition, entry for entry.
inline Decomposition cvar_decomposition(const CorrelatedGbmPairParams& params, const Path& path,
                                        double horizon, double lambda) {
    if (path.factors() != 2)
        throw std::invalid_argument("cvar_decomposition: path must have two factors");
    if (!(horizon > 0.0))
        throw std::invalid_argument("cvar_decomposition: horizon must be positive");
    const double drift =
        params.a1 + params.a2 - 0.5 * (params.b1 * params.b1 + params.b2 * params.b2);
    const double var = params.b1 * params.b1 + params.b2 * params.b2 +
                       2.0 * params.rho * params.b1 * params.b2;
    if (!(var > 0.0))
        throw std::invalid_argument("cvar_decomposition: degenerate pair variance");
    const double weight = lognormal_quantile(drift * horizon, std::sqrt(var * horizon), lambda);

    Decomposition dec = iasu_closed_form(stock_product_payoff(), path);
    for (auto& series : dec.contributions)
        for (double& v : series) v *= weight;
    for (double& v : dec.total) v *= weight;
    dec.additivity_gap = additivity_gap_series(dec);
    return dec;
}

// ======================================================================
// Black-Scholes call with calendar time as a factor
// ======================================================================

struct OptionSpec {
    double s0 = 100.0;
    double strike = 100.0;
    double rate = 0.0;
    double vol = 0.2;       // strictly positive
    double maturity = 1.0;  // strictly positive
    int steps = 250;
};

struct BsGreeks {
    double price = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
};

namespace detail {

inline void check_option_spec(const OptionSpec& spec) {
    if (!(spec.strike > 0.0)) throw std::invalid_argument("OptionSpec: strike must be positive");
    if (!(spec.vol > 0.0)) throw std::invalid_argument("OptionSpec: vol must be positive");
    if (!(spec.maturity > 0.0))
        throw std::invalid_argument("OptionSpec: maturity must be positive");
    if (spec.steps < 1) throw std::invalid_argument("OptionSpec: steps must be positive");
}

} // namespace detail

inline BsGreeks bs_greeks(double x, double t, const OptionSpec& spec) {
    detail::check_option_spec(spec);
    if (!(x > 0.0)) throw std::invalid_argument("bs_greeks: spot must be positive");
    if (!(t < spec.maturity))
        throw std::domain_error("bs_greeks: time at or past expiry");
    const double u = spec.maturity - t;
    const double sqrt_u = std::sqrt(u);
    const double sig_rt = spec.vol * sqrt_u;
    const double d1 =
        (std::log(x / spec.strike) + (spec.rate + 0.5 * spec.vol * spec.vol) * u) / sig_rt;
    const double d2 = d1 - sig_rt;
    const double disc = std::exp(-spec.rate * u);

    BsGreeks g;
    g.price = x * norm_cdf(d1) - spec.strike * disc * norm_cdf(d2);
    g.delta = norm_cdf(d1);
    g.gamma = norm_pdf(d1) / (x * sig_rt);
    g.theta = -x * norm_pdf(d1) * spec.vol / (2.0 * sqrt_u) -
              spec.rate * spec.strike * disc * norm_cdf(d2);
    return g;
}

// The call price as a payoff of (spot, calendar time).  Second derivatives in
// the time direction are needed by the closed forms even though calendar time
// has zero quadratic variation; they are spelled out rather than left to
// finite differences so the engine sees an exact Hessian.
inline SmoothPayoff bs_call_payoff(const OptionSpec& spec) {
    detail::check_option_spec(spec);
    SmoothPayoff f;
    f.dim = 2;
    f.value = [spec](const std::vector<double>& x) { return bs_greeks(x[0], x[1], spec).price; };
    f.gradient = [spec](const std::vector<double>& x) {
        const BsGreeks g = bs_greeks(x[0], x[1], spec);
        return std::vector<double>{g.delta, g.theta};
    };
    f.hessian = [spec](const std::vector<double>& x) {
        const double u = spec.maturity - x[1];
        if (!(u > 0.0)) throw std::domain_error("bs_call_payoff: time at or past expiry");
        const double spot = x[0];
        const double sqrt_u = std::sqrt(u);
        const double sig_rt = spec.vol * sqrt_u;
        const double log_m = std::log(spot / spec.strike);
        const double d1 = (log_m + (spec.rate + 0.5 * spec.vol * spec.vol) * u) / sig_rt;
        const double d2 = d1 - sig_rt;
        const double disc = std::exp(-spec.rate * u);
        // Sensitivities of d1, d2 to the remaining time u.
        const double d1_u =
            (-log_m + (spec.rate + 0.5 * spec.vol * spec.vol) * u) / (2.0 * spec.vol * u * sqrt_u);
        const double d2_u = d1_u - spec.vol / (2.0 * sqrt_u);

        const double f_xx = norm_pdf(d1) / (spot * sig_rt);
        const double f_xt = -norm_pdf(d1) * d1_u;
        // f_tt = -dTheta/du, with Theta written as a function of u.
        const double f_tt =
            spot * spec.vol *
                (-d1 * norm_pdf(d1) * d1_u / (2.0 * sqrt_u) - norm_pdf(d1) / (4.0 * u * sqrt_u)) +
            spec.rate * spec.strike *
                (-spec.rate * disc * norm_cdf(d2) + disc * norm_pdf(d2) * d2_u);

        Matrix h(2);
        h(0, 0) = f_xx;
        h(0, 1) = f_xt;
        h(1, 0) = f_xt;
        h(1, 1) = f_tt;
        return h;
    };
    return f;
}

// Fraction of the option's life covered by the hedging window; stopping short
// of expiry keeps the pricing function twice differentiable on the whole path.
inline constexpr double kPnlWindowFraction = 0.8;

inline Path bs_pnl_path(const OptionSpec& spec, std::uint64_t seed,
                        double window_fraction = kPnlWindowFraction) {
    detail::check_option_spec(spec);
    if (!(window_fraction > 0.0 && window_fraction < 1.0))
        throw std::invalid_argument("bs_pnl_path: window fraction must lie in (0, 1)");
    const double horizon = window_fraction * spec.maturity;
    ModelSpec stock;
    stock.params = BsStockParams{spec.s0, spec.rate, spec.vol};
    stock.steps = spec.steps;
    stock.horizon = horizon;
    stock.seed = seed;
    ModelSpec clock;
    clock.params = CalendarTimeParams{};
    clock.steps = spec.steps;
    clock.horizon = horizon;
    return compose({simulate(stock), simulate(clock)});
}

inline Decomposition bs_pnl_decomposition(const OptionSpec& spec, std::uint64_t seed,
                                          double window_fraction = kPnlWindowFraction) {
    const Path path = bs_pnl_path(spec, seed, window_fraction);
    Decomposition dec = iasu_closed_form(bs_call_payoff(spec), path);
    dec.labels = {"S", "tau"};
    return dec;
}

// ======================================================================
// Foreign zero-coupon bond
// ======================================================================

struct BondSpec {
    double maturity = 1.0;
    double kappa = 0.5;      // rate mean-reversion speed
    double theta = 0.02;     // rate mean-reversion level
    double sigma = 0.01;     // rate vol, strictly positive
    double r0 = 0.01;
    double fx_vol = 0.01;    // strictly positive
    double rho = -0.5;       // FX-rate Brownian correlation
    std::vector<std::pair<double, double>> credit_jumps = {{0.5, 0.01}};  // (time, new spread)
    int steps = 1000;
    std::uint64_t seed = 0;
};

// Domestic value of the foreign zero-coupon bond: FX rate times the bond
// price under continuously compounded rate-plus-spread discounting,
//   f(x) = x_1 exp(-(x_2 + x_3)(T - x_4)).
inline SmoothPayoff bond_payoff(double maturity) {
    if (!(maturity > 0.0)) throw std::invalid_argument("bond_payoff: maturity must be positive");
    SmoothPayoff f;
    f.dim = 4;
    f.value = [maturity](const std::vector<double>& x) {
        return x[0] * std::exp(-(x[1] + x[2]) * (maturity - x[3]));
    };
    f.gradient = [maturity](const std::vector<double>& x) {
        const double u = maturity - x[3];
        const double e = std::exp(-(x[1] + x[2]) * u);
        return std::vector<double>{e, -x[0] * u * e, -x[0] * u * e, x[0] * (x[1] + x[2]) * e};
    };
    f.hessian = [maturity](const std::vector<double>& x) {
        const double u = maturity - x[3];
        const double rate = x[1] + x[2];
        const double e = std::exp(-rate * u);
        Matrix h(4);
        h(0, 1) = h(1, 0) = -u * e;
        h(0, 2) = h(2, 0) = -u * e;
        h(0, 3) = h(3, 0) = rate * e;
        h(1, 1) = h(1, 2) = h(2, 1) = h(2, 2) = x[0] * u * u * e;
        h(1, 3) = h(3, 1) = x[0] * e * (1.0 - u * rate);
        h(2, 3) = h(3, 2) = x[0] * e * (1.0 - u * rate);
        h(3, 3) = x[0] * rate * rate * e;
        return h;
    };
    return f;
}

namespace detail {

inline void check_bond_spec(const BondSpec& spec) {
    if (!(spec.maturity > 0.0)) throw std::invalid_argument("BondSpec: maturity must be positive");
    if (spec.steps < 1) throw std::invalid_argument("BondSpec: steps must be positive");
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("BondSpec: rate vol must be positive");
    if (!(spec.fx_vol > 0.0)) throw std::invalid_argument("BondSpec: FX vol must be positive");
    if (spec.kappa < 0.0) throw std::invalid_argument("BondSpec: kappa must be nonnegative");
    if (!(spec.rho >= -1.0 && spec.rho <= 1.0))
        throw std::invalid_argument("BondSpec: correlation must lie in [-1, 1]");
}

} // namespace detail

// Joint realization of (FX, rate, credit spread, calendar time).  FX and the
// rate share correlated Brownian drivers, so they are drawn together from the
// exact joint transition; the spread is the deterministic jump schedule.
inline Path bond_path(const BondSpec& spec) {
    detail::check_bond_spec(spec);
    const int n = spec.steps;
    const double h = spec.maturity / n;

    const double decay = std::exp(-spec.kappa * h);
    // kappa -> 0 limits: the integrated-decay factors degenerate to h.
    const double var_r = spec.kappa > 0.0
                             ? spec.sigma * spec.sigma * (1.0 - decay * decay) / (2.0 * spec.kappa)
                             : spec.sigma * spec.sigma * h;
    const double cov = spec.kappa > 0.0 ? spec.rho * spec.sigma * (1.0 - decay) / spec.kappa
                                        : spec.rho * spec.sigma * h;
    const double resid_sd = std::sqrt(std::max(0.0, var_r - cov * cov / h));
    const double sqrt_h = std::sqrt(h);

    Path path;
    path.times = detail::uniform_grid(n, spec.maturity);
    path.values.assign(4, std::vector<double>(n + 1));
    path.jump_flags.assign(4, std::vector<std::uint8_t>(n + 1, 0));

    path.values[0][0] = 1.0;       // FX
    path.values[1][0] = spec.r0;   // rate
    for (int l = 0; l <= n; ++l) path.values[3][l] = path.times[l];

    Rng rng(spec.seed);
    for (int l = 1; l <= n; ++l) {
        const double u = rng.next_gaussian();
        const double v = rng.next_gaussian();
        const double fx_driver = sqrt_h * u;
        const double rate_noise = (cov / sqrt_h) * u + resid_sd * v;
        path.values[0][l] =
            path.values[0][l - 1] *
            std::exp(-0.5 * spec.fx_vol * spec.fx_vol * h + spec.fx_vol * fx_driver);
        path.values[1][l] = spec.theta + (path.values[1][l - 1] - spec.theta) * decay + rate_noise;
    }

    double spread = 0.0;
    int next_jump = 0;
    std::vector<std::pair<int, double>> jumps;
    for (const auto& [time, level] : spec.credit_jumps)
        jumps.emplace_back(detail::grid_index_of(time, n, spec.maturity), level);
    for (std::size_t j = 1; j < jumps.size(); ++j)
        if (jumps[j].first <= jumps[j - 1].first)
            throw std::invalid_argument("BondSpec: credit jump times must be increasing");
    path.values[2][0] = spread;
    for (int l = 1; l <= n; ++l) {
        if (next_jump < static_cast<int>(jumps.size()) && jumps[next_jump].first == l) {
            spread = jumps[next_jump].second;
            path.jump_flags[2][l] = 1;
            ++next_jump;
        }
        path.values[2][l] = spread;
    }

    path.validate();
    return path;
}

struct BondDecomposition {
    Decomposition dec;
    InteractionMatrix interactions;
    Path path;
};

inline BondDecomposition bond_decomposition(const BondSpec& spec) {
    BondDecomposition out;
    out.path = bond_path(spec);
    const SmoothPayoff payoff = bond_payoff(spec.maturity);
    out.dec = iasu_closed_form(payoff, out.path);
    out.dec.labels = {"FX", "IR", "CS", "tau"};
    out.interactions = interaction_matrix(payoff, out.path);
    return out;
}

// ======================================================================
// Waterfall reporting
// ======================================================================

struct WaterfallEntry {
    std::string factor;
    double contribution = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
};

namespace detail {

inline int waterfall_index(const Decomposition& dec, double time) {
    const double horizon = dec.times.empty() ? 0.0 : dec.times.back();
    const double tol = 1e-9 * std::max(1.0, horizon);
    for (std::size_t m = 0; m < dec.times.size(); ++m)
        if (std::abs(dec.times[m] - time) <= tol) return static_cast<int>(m);
    throw std::invalid_argument("make_waterfall: window endpoint " + std::to_string(time) +
                                " is not a grid time");
}

} // namespace detail

inline std::vector<WaterfallEntry> make_waterfall(const Decomposition& dec, double window_start,
                                                  double window_end) {
    const int start = detail::waterfall_index(dec, window_start);
    const int end = detail::waterfall_index(dec, window_end);
    if (end < start) throw std::invalid_argument("make_waterfall: window ends before it starts");
    std::vector<WaterfallEntry> entries;
    for (int i = 0; i < dec.factors(); ++i) {
        WaterfallEntry e;
        e.factor = dec.label(i);
        e.contribution = dec.contributions[i][end] - dec.contributions[i][start];
        e.window_start = dec.times[start];
        e.window_end = dec.times[end];
        entries.push_back(std::move(e));
    }
    return entries;
}

inline void write_waterfall_csv(const std::vector<WaterfallEntry>& entries, std::ostream& os) {
    os << "factor,contribution,window_start,window_end\n";
    for (const auto& e : entries)
        os << e.factor << ',' << detail::format_double(e.contribution) << ','
           << detail::format_double(e.window_start) << ',' << detail::format_double(e.window_end)
           << '\n';
}

} // namespace seqdec
