#pragma once

// Path simulation on uniform grids with exact transition sampling.
//
// Every model draws its Gaussians from a splitmix64 counter stream, so a
// simulated path is a pure function of the spec (including the seed) and
// reproduces bit-for-bit.  GBM-type factors use the lognormal closed form,
// Vasicek uses its exact Gaussian transition; nothing is Euler-discretized.

#include <cmath>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "path.hpp"
#include "rng.hpp"

namespace seqdec {

struct GbmParams {
    double x0 = 1.0;
    double drift = 0.0;
    double vol = 0.0;    // vol = 0 degenerates to the deterministic exponential
};

struct CorrelatedGbmPairParams {
    double x1_0 = 1.0, x2_0 = 1.0;
    double a1 = 0.0, a2 = 0.0;
    double b1 = 0.2, b2 = 0.2;   // strictly positive
    double rho = 0.0;            // in [-1, 1]
};

struct VasicekParams {
    double r0 = 0.0;
    double kappa = 0.0;   // nonnegative; kappa = 0 degenerates to scaled Brownian motion
    double theta = 0.0;
    double sigma = 0.0;   // strictly positive
};

struct JumpScheduleParams {
    double x0 = 0.0;
    std::vector<std::pair<double, double>> jumps;   // (time, new value), times on the grid
};

struct CalendarTimeParams {};

struct BsStockParams {
    double s0 = 100.0;
    double rate = 0.0;
    double vol = 0.2;     // strictly positive
};

using ModelParams = std::variant<GbmParams, CorrelatedGbmPairParams, VasicekParams,
                                 JumpScheduleParams, CalendarTimeParams, BsStockParams>;

struct ModelSpec {
    ModelParams params;
    int steps = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;

    int dim() const {
        return std::holds_alternative<CorrelatedGbmPairParams>(params) ? 2 : 1;
    }
    const char* kind() const {
        struct Visitor {
            const char* operator()(const GbmParams&) const { return "gbm"; }
            const char* operator()(const CorrelatedGbmPairParams&) const { return "correlated_gbm_pair"; }
            const char* operator()(const VasicekParams&) const { return "vasicek"; }
            const char* operator()(const JumpScheduleParams&) const { return "pure_jump_schedule"; }
            const char* operator()(const CalendarTimeParams&) const { return "calendar_time"; }
            const char* operator()(const BsStockParams&) const { return "bs_stock"; }
        };
        return std::visit(Visitor{}, params);
    }
};

namespace detail {

inline void check_grid_spec(const ModelSpec& spec) {
    if (spec.steps < 1) throw std::invalid_argument("simulate: steps must be positive");
    if (!(spec.horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
}

inline std::vector<double> uniform_grid(int steps, double horizon) {
    std::vector<double> t(steps + 1);
    for (int l = 0; l <= steps; ++l) t[l] = horizon * l / steps;
    t[0] = 0.0;
    return t;
}

// Locates a jump time on the grid; jumps must sit on grid points.
inline int grid_index_of(double time, int steps, double horizon) {
    const int l = static_cast<int>(std::lround(time * steps / horizon));
    if (l < 1 || l > steps || std::abs(horizon * l / steps - time) > 1e-9 * horizon)
        throw std::invalid_argument("simulate: jump time " + std::to_string(time) +
                                    " does not lie on the grid");
    return l;
}

} // namespace detail

inline Path simulate(const ModelSpec& spec) {
    detail::check_grid_spec(spec);
    const int n = spec.steps;
    const double h = spec.horizon / n;
    Path path;
    path.times = detail::uniform_grid(n, spec.horizon);

    if (const auto* p = std::get_if<GbmParams>(&spec.params)) {
        if (!(p->x0 > 0.0)) throw std::invalid_argument("gbm: x0 must be positive");
        if (p->vol < 0.0) throw std::invalid_argument("gbm: vol must be nonnegative");
        Rng rng(spec.seed);
        std::vector<double> v(n + 1);
        v[0] = p->x0;
        double log_x = std::log(p->x0);
        for (int l = 1; l <= n; ++l) {
            log_x += (p->drift - 0.5 * p->vol * p->vol) * h +
                     p->vol * std::sqrt(h) * (p->vol > 0.0 ? rng.next_gaussian() : 0.0);
            v[l] = std::exp(log_x);
        }
        path.values = {std::move(v)};
    } else if (const auto* p = std::get_if<CorrelatedGbmPairParams>(&spec.params)) {
        if (!(p->x1_0 > 0.0 && p->x2_0 > 0.0))
            throw std::invalid_argument("correlated_gbm_pair: initial values must be positive");
        if (!(p->b1 > 0.0 && p->b2 > 0.0))
            throw std::invalid_argument("correlated_gbm_pair: volatilities must be positive");
        if (!(p->rho >= -1.0 && p->rho <= 1.0))
            throw std::invalid_argument("correlated_gbm_pair: rho must lie in [-1, 1]");
        Rng rng(spec.seed);
        std::vector<double> v1(n + 1), v2(n + 1);
        v1[0] = p->x1_0;
        v2[0] = p->x2_0;
        double l1 = std::log(p->x1_0), l2 = std::log(p->x2_0);
        const double mix = std::sqrt(1.0 - p->rho * p->rho);
        const double sq = std::sqrt(h);
        for (int l = 1; l <= n; ++l) {
            const double z1 = rng.next_gaussian();
            const double z2 = rng.next_gaussian();
            l1 += (p->a1 - 0.5 * p->b1 * p->b1) * h + p->b1 * sq * z1;
            l2 += (p->a2 - 0.5 * p->b2 * p->b2) * h + p->b2 * sq * (p->rho * z1 + mix * z2);
            v1[l] = std::exp(l1);
            v2[l] = std::exp(l2);
        }
        path.values = {std::move(v1), std::move(v2)};
    } else if (const auto* p = std::get_if<VasicekParams>(&spec.params)) {
        if (p->kappa < 0.0) throw std::invalid_argument("vasicek: kappa must be nonnegative");
        if (!(p->sigma > 0.0)) throw std::invalid_argument("vasicek: sigma must be positive");
        Rng rng(spec.seed);
        // Exact transition: r' = theta + (r - theta) e^{-kh} + sd * Z.
        const double decay = std::exp(-p->kappa * h);
        const double var = p->kappa > 0.0
                               ? p->sigma * p->sigma * (1.0 - decay * decay) / (2.0 * p->kappa)
                               : p->sigma * p->sigma * h;
        const double sd = std::sqrt(var);
        std::vector<double> v(n + 1);
        v[0] = p->r0;
        for (int l = 1; l <= n; ++l)
            v[l] = p->theta + (v[l - 1] - p->theta) * decay + sd * rng.next_gaussian();
        path.values = {std::move(v)};
    } else if (const auto* p = std::get_if<JumpScheduleParams>(&spec.params)) {
        std::vector<double> v(n + 1, p->x0);
        std::vector<std::uint8_t> flags(n + 1, 0);
        double last_time = 0.0;
        double level = p->x0;
        for (const auto& [time, value] : p->jumps) {
            if (time <= last_time)
                throw std::invalid_argument("pure_jump_schedule: jump times must be increasing");
            const int l = detail::grid_index_of(time, n, spec.horizon);
            if (flags[l]) throw std::invalid_argument("pure_jump_schedule: duplicate jump time");
            flags[l] = 1;
            level = value;
            for (int m = l; m <= n; ++m) v[m] = level;
            last_time = time;
        }
        path.values = {std::move(v)};
        path.jump_flags = {std::move(flags)};
        path.validate();
        return path;
    } else if (std::get_if<CalendarTimeParams>(&spec.params)) {
        path.values = {path.times};
    } else if (const auto* p = std::get_if<BsStockParams>(&spec.params)) {
        if (!(p->s0 > 0.0)) throw std::invalid_argument("bs_stock: s0 must be positive");
        if (!(p->vol > 0.0)) throw std::invalid_argument("bs_stock: vol must be positive");
        Rng rng(spec.seed);
        std::vector<double> v(n + 1);
        v[0] = p->s0;
        double log_s = std::log(p->s0);
        const double sq = std::sqrt(h);
        for (int l = 1; l <= n; ++l) {
            log_s += (p->rate - 0.5 * p->vol * p->vol) * h + p->vol * sq * rng.next_gaussian();
            v[l] = std::exp(log_s);
        }
        path.values = {std::move(v)};
    } else {
        throw std::logic_error("simulate: unhandled model kind");
    }

    path.jump_flags.assign(path.values.size(),
                           std::vector<std::uint8_t>(path.times.size(), 0));
    path.validate();
    return path;
}

inline Path simulate_brownian(int steps, double horizon, std::uint64_t seed) {
    ModelSpec spec;
    spec.steps = steps;
    spec.horizon = horizon;
    spec.seed = seed;
    detail::check_grid_spec(spec);
    Rng rng(seed);
    Path path;
    path.times = detail::uniform_grid(steps, horizon);
    std::vector<double> v(steps + 1, 0.0);
    const double sq = std::sqrt(horizon / steps);
    for (int l = 1; l <= steps; ++l) v[l] = v[l - 1] + sq * rng.next_gaussian();
    path.values = {std::move(v)};
    path.jump_flags = {std::vector<std::uint8_t>(steps + 1, 0)};
    path.validate();
    return path;
}

// ======================================================================
// Flat key-value model configs
//
// Lines of "key = value"; '#' starts a comment.  Common keys: kind, steps,
// horizon, seed.  Kind-specific keys are documented in the README.
// ======================================================================

namespace detail {

struct KvConfig {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<char> used;

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t");
        std::size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    }

    const std::string* find(const std::string& key) {
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i].first == key) {
                used[i] = 1;
                return &entries[i].second;
            }
        return nullptr;
    }

    std::string require(const std::string& key) {
        const std::string* v = find(key);
        if (!v) throw ParseError("config: missing key '" + key + "'");
        return *v;
    }

    double number(const std::string& key) { return parse_number(require(key), key); }

    double number_or(const std::string& key, double fallback) {
        const std::string* v = find(key);
        return v ? parse_number(*v, key) : fallback;
    }

    static double parse_number(const std::string& text, const std::string& key) {
        try {
            std::size_t used_chars = 0;
            const double v = std::stod(text, &used_chars);
            if (used_chars != text.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ParseError("config: bad numeric value for '" + key + "': '" + text + "'");
        }
    }

    void reject_unused() const {
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (!used[i])
                throw ParseError("config: unknown key '" + entries[i].first + "'");
    }
};

inline KvConfig read_kv_config(std::istream& is) {
    KvConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = KvConfig::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = KvConfig::trim(line.substr(0, eq));
        std::string value = KvConfig::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config line " + std::to_string(line_no) + ": empty key or value");
        cfg.entries.emplace_back(std::move(key), std::move(value));
    }
    cfg.used.assign(cfg.entries.size(), 0);
    return cfg;
}

inline std::vector<std::pair<double, double>> parse_jump_list(const std::string& text) {
    // "time:value,time:value,..."
    std::vector<std::pair<double, double>> jumps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw ParseError("config: jump entry '" + item + "' must be time:value");
        jumps.emplace_back(KvConfig::parse_number(item.substr(0, colon), "jumps"),
                           KvConfig::parse_number(item.substr(colon + 1), "jumps"));
    }
    if (jumps.empty()) throw ParseError("config: empty jump list");
    return jumps;
}

} // namespace detail

inline ModelSpec parse_model_config(std::istream& is) {
    auto cfg = detail::read_kv_config(is);
    const std::string kind = cfg.require("kind");
    ModelSpec spec;
    spec.steps = static_cast<int>(cfg.number("steps"));
    spec.horizon = cfg.number("horizon");
    spec.seed = static_cast<std::uint64_t>(cfg.number_or("seed", 0.0));

    if (kind == "gbm") {
        GbmParams p;
        p.x0 = cfg.number("x0");
        p.drift = cfg.number_or("drift", 0.0);
        p.vol = cfg.number_or("vol", 0.0);
        spec.params = p;
    } else if (kind == "correlated_gbm_pair") {
        CorrelatedGbmPairParams p;
        p.x1_0 = cfg.number("x1_0");
        p.x2_0 = cfg.number("x2_0");
        p.a1 = cfg.number_or("a1", 0.0);
        p.a2 = cfg.number_or("a2", 0.0);
        p.b1 = cfg.number("b1");
        p.b2 = cfg.number("b2");
        p.rho = cfg.number_or("rho", 0.0);
        spec.params = p;
    } else if (kind == "vasicek") {
        VasicekParams p;
        p.r0 = cfg.number("r0");
        p.kappa = cfg.number("kappa");
        p.theta = cfg.number("theta");
        p.sigma = cfg.number("sigma");
        spec.params = p;
    } else if (kind == "pure_jump_schedule") {
        JumpScheduleParams p;
        p.x0 = cfg.number("x0");
        p.jumps = detail::parse_jump_list(cfg.require("jumps"));
        spec.params = p;
    } else if (kind == "calendar_time") {
        spec.params = CalendarTimeParams{};
    } else if (kind == "bs_stock") {
        BsStockParams p;
        p.s0 = cfg.number("s0");
        p.rate = cfg.number_or("rate", 0.0);
        p.vol = cfg.number("vol");
        spec.params = p;
    } else {
        throw ParseError("config: unknown kind '" + kind + "'");
    }
    cfg.reject_unused();
    return spec;
}

} // namespace seqdec
