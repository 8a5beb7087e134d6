#pragma once

// Discretized closed forms of the limiting decompositions.
//
// Per grid step, a factor's contribution is assembled from left-point Ito
// terms: drift f_i*dX_i, own curvature 0.5*f_ii*dX_i^2, and cross curvature
// f_ij*dX_i*dX_j against every factor that updates earlier in the chosen
// order.  A jump-flagged increment contributes through a bracket of stopped
// states instead; continuous factors enter such brackets at their time-t_k
// values, which is their exact left limit at the jump instant.
//
// The reductions (two-order average, portfolio split) are arranged to share
// every floating-point addend with the direct forms, so the exactness
// statements hold bitwise, not merely up to rounding.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "decomposition.hpp"
#include "grid_decomp.hpp"
#include "path.hpp"
#include "payoff.hpp"
#include "schedule.hpp"

namespace seqdec {

// Raised by the no-simultaneous-jump routes; the caller must fall back to the
// general (order-enumerating) form.
class SimultaneousJumpsPresent : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

// Workspace for one grid step: previous and current states, increments, jump
// flags, and the payoff derivatives at the step's left endpoint.
class LimitStep {
public:
    LimitStep(const SmoothPayoff& payoff, const Path& path)
        : path_(&path), f_(&payoff), d_(path.factors()),
          prev_(d_), cur_(d_), dx_(d_), flagged_(d_), buf_b_(d_), buf_c_(d_) {}

    void load(int k) {
        for (int i = 0; i < d_; ++i) {
            prev_[i] = path_->values[i][k - 1];
            cur_[i] = path_->values[i][k];
            dx_[i] = cur_[i] - prev_[i];
            flagged_[i] = path_->jump_flags[i][k];
        }
        grad_ = f_->gradient(prev_);
        hess_ = f_->hessian(prev_);
    }

    bool flagged(int i) const { return flagged_[i] != 0; }

    // Step increment charged to factor i when exactly the factors for which
    // `updates_earlier` holds have already moved to their new values.
    template <class Pred>
    double increment(int i, Pred&& updates_earlier) {
        if (flagged_[i]) {
            for (int j = 0; j < d_; ++j) {
                const double v = (j == i || !flagged_[j] || updates_earlier(j)) ? cur_[j] : prev_[j];
                buf_b_[j] = v;
                buf_c_[j] = v;
            }
            buf_c_[i] = prev_[i];
            return (*f_)(buf_b_) - (*f_)(buf_c_);
        }
        const double drift = grad_[i] * dx_[i];
        const double own = 0.5 * hess_(i, i) * dx_[i] * dx_[i];
        double cross = 0.0;
        for (int j = 0; j < d_; ++j)
            if (j != i && !flagged_[j] && updates_earlier(j))
                cross += hess_(i, j) * dx_[i] * dx_[j];
        return drift + own + cross;
    }

private:
    const Path* path_;
    const SmoothPayoff* f_;
    int d_;
    std::vector<double> prev_, cur_, dx_;
    std::vector<std::uint8_t> flagged_;
    std::vector<double> buf_b_, buf_c_;
    std::vector<double> grad_;
    Matrix hess_;
};

inline std::vector<std::vector<double>> isu_contributions(const SmoothPayoff& f, const Path& path,
                                                          const Permutation& perm) {
    const int d = path.factors();
    const int n = path.steps();
    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    LimitStep step(f, path);
    for (int k = 1; k <= n; ++k) {
        step.load(k);
        for (int i = 0; i < d; ++i) {
            const double inc =
                step.increment(i, [&perm, i](int j) { return perm.rank(j) < perm.rank(i); });
            contrib[i][k] = contrib[i][k - 1] + inc;
        }
    }
    return contrib;
}

// The two-order average, folded per step.  Both iasu entry points evaluate
// exactly this, so their outputs agree bitwise and the reduction identity is
// exact by shared addends rather than by luck of rounding.
inline std::vector<std::vector<double>> iasu_pair_contributions(const SmoothPayoff& f,
                                                                const Path& path) {
    const int d = path.factors();
    const int n = path.steps();
    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    LimitStep step(f, path);
    for (int k = 1; k <= n; ++k) {
        step.load(k);
        for (int i = 0; i < d; ++i) {
            const double fwd = step.increment(i, [i](int j) { return j < i; });
            const double bwd = step.increment(i, [i](int j) { return j > i; });
            contrib[i][k] = contrib[i][k - 1] + 0.5 * (fwd + bwd);
        }
    }
    return contrib;
}

inline Decomposition finish_closed_form(Method method, const SmoothPayoff& f, const Path& path,
                                        std::vector<std::vector<double>> contributions,
                                        std::optional<Permutation> perm = std::nullopt) {
    auto dec = make_decomposition(method, path, f, std::move(contributions), std::move(perm));
    dec.additivity_gap = additivity_gap_series(dec);
    return dec;
}

} // namespace detail

inline Decomposition isu_closed_form(const SmoothPayoff& f, const Path& path,
                                     const Permutation& perm) {
    f.check_dim(path.factors());
    if (perm.dim() != path.factors())
        throw std::invalid_argument("isu_closed_form: permutation dimension mismatch");
    return detail::finish_closed_form(Method::isu, f, path,
                                      detail::isu_contributions(f, path, perm), perm);
}

// The simplified form valid when no two factors jump at once; the brackets it
// produces coincide addend-for-addend with the general form on such paths.
inline Decomposition isu_no_simul_jumps(const SmoothPayoff& f, const Path& path,
                                        const Permutation& perm) {
    if (has_simultaneous_jumps(path))
        throw SimultaneousJumpsPresent(
            "isu_no_simul_jumps: path has simultaneous jumps; use isu_closed_form");
    return isu_closed_form(f, path, perm);
}

inline Decomposition ioat_closed_form(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    const int d = path.factors();
    const int n = path.steps();
    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    detail::LimitStep step(f, path);
    for (int k = 1; k <= n; ++k) {
        step.load(k);
        for (int i = 0; i < d; ++i) {
            // No factor counts as updated earlier: no cross terms, and jump
            // brackets freeze every other factor at its left limit.
            const double inc = step.increment(i, [](int) { return false; });
            contrib[i][k] = contrib[i][k - 1] + inc;
        }
    }
    auto dec = detail::finish_closed_form(Method::ioat, f, path, std::move(contrib));
    for (int m = 0; m < dec.points(); ++m) {
        double explained = 0.0;
        for (int i = 0; i < d; ++i) explained += dec.contributions[i][m];
        dec.residual[m] = dec.total[m] - explained;
    }
    return dec;
}

inline Decomposition iasu_two_perm(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    if (has_simultaneous_jumps(path))
        throw SimultaneousJumpsPresent(
            "iasu_two_perm: path has simultaneous jumps; use iasu_closed_form");
    return detail::finish_closed_form(Method::iasu, f, path,
                                      detail::iasu_pair_contributions(f, path));
}

inline Decomposition iasu_closed_form(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    if (!has_simultaneous_jumps(path))
        return detail::finish_closed_form(Method::iasu, f, path,
                                          detail::iasu_pair_contributions(f, path));

    // Simultaneous jumps make the bracket order-dependent; average the full
    // order enumeration.  Refuses past the cap instead of approximating.
    const int d = path.factors();
    const int n = path.steps();
    const auto perms = all_permutations(d);
    std::vector<std::vector<double>> acc(d, std::vector<double>(n + 1, 0.0));
    for (const auto& perm : perms) {
        const auto contrib = detail::isu_contributions(f, path, perm);
        for (int i = 0; i < d; ++i)
            for (int m = 0; m <= n; ++m) acc[i][m] += contrib[i][m];
    }
    const double inv = 1.0 / static_cast<double>(perms.size());
    for (int i = 0; i < d; ++i)
        for (int m = 0; m <= n; ++m) acc[i][m] *= inv;
    return detail::finish_closed_form(Method::iasu, f, path, std::move(acc));
}

// ======================================================================
// Continuous-path triple
//
// On a path with no jumps the three limit decompositions share their drift
// and own-curvature terms and differ only in how they assign the interaction
// series I_ij.  This assembly materializes that structure: every output is
// built from the same base series plus ascending-j folds of I, so the
// attribution identities hold bitwise.
// ======================================================================

struct ContinuousTriple {
    Decomposition ioat;              // base terms only; interactions live in the residual
    Decomposition iasu;              // base + half of every off-diagonal interaction
    InteractionMatrix interactions;  // cumulative I_ij series

    // Interaction mass assigned to factor i under `perm`: the ascending-j fold
    // of I_ij over the factors that update earlier.
    std::vector<double> interaction_assignment(const Permutation& perm, int i) const {
        std::vector<double> out(interactions.times.size(), 0.0);
        for (int j = 0; j < interactions.d; ++j) {
            if (j == i || !(perm.rank(j) < perm.rank(i))) continue;
            const auto& series = interactions.at(i, j);
            for (std::size_t m = 0; m < out.size(); ++m) out[m] += series[m];
        }
        return out;
    }

    Decomposition isu(const Permutation& perm) const {
        const int d = interactions.d;
        if (perm.dim() != d)
            throw std::invalid_argument("continuous_triple: permutation dimension mismatch");
        Decomposition dec;
        dec.method = Method::isu;
        dec.perm = perm;
        dec.times = ioat.times;
        dec.total = ioat.total;
        dec.contributions.assign(d, {});
        for (int i = 0; i < d; ++i) {
            const auto assigned = interaction_assignment(perm, i);
            auto& series = dec.contributions[i];
            series.resize(assigned.size());
            for (std::size_t m = 0; m < assigned.size(); ++m)
                series[m] = ioat.contributions[i][m] + assigned[m];
        }
        dec.residual.assign(dec.points(), 0.0);
        dec.additivity_gap = additivity_gap_series(dec);
        return dec;
    }
};

inline ContinuousTriple continuous_triple(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    for (const auto& row : path.jump_flags)
        for (std::uint8_t flag : row)
            if (flag)
                throw std::invalid_argument("continuous_triple: path has jump flags");

    ContinuousTriple triple;
    triple.interactions = interaction_matrix(f, path);
    triple.ioat = ioat_closed_form(f, path);

    const int d = path.factors();
    const Permutation fwd = Permutation::identity(d);
    const Permutation bwd = reverse_identity(d);
    std::vector<std::vector<double>> iasu_contrib(d);
    for (int i = 0; i < d; ++i) {
        const auto below = triple.interaction_assignment(fwd, i);
        const auto above = triple.interaction_assignment(bwd, i);
        auto& series = iasu_contrib[i];
        series.resize(below.size());
        for (std::size_t m = 0; m < below.size(); ++m)
            series[m] = triple.ioat.contributions[i][m] + 0.5 * (below[m] + above[m]);
    }
    triple.iasu = detail::finish_closed_form(Method::iasu, f, path, std::move(iasu_contrib));
    return triple;
}

// ======================================================================
// Portfolio split
//
// A payoff that is a sum of terms, each touching only a few factors, gets its
// limit decomposition term by term on the restricted factor subsets; the
// factorial cost then scales with the largest support, not with d.
// ======================================================================

namespace detail {

// View a full-dimension payoff as a payoff on the `factors` coordinates, the
// rest frozen at `anchor` (they must not matter; the caller validates that).
inline SmoothPayoff restrict_payoff(const SmoothPayoff& f, const std::vector<int>& factors,
                                    const std::vector<double>& anchor) {
    const int sub_d = static_cast<int>(factors.size());
    SmoothPayoff g;
    g.dim = sub_d;
    auto embed = [factors, anchor](const std::vector<double>& y) {
        std::vector<double> x = anchor;
        for (std::size_t r = 0; r < factors.size(); ++r) x[factors[r]] = y[r];
        return x;
    };
    g.value = [f, embed](const std::vector<double>& y) { return f.value(embed(y)); };
    g.gradient = [f, embed, factors, sub_d](const std::vector<double>& y) {
        const auto full = f.gradient(embed(y));
        std::vector<double> out(sub_d);
        for (int r = 0; r < sub_d; ++r) out[r] = full[factors[r]];
        return out;
    };
    g.hessian = [f, embed, factors, sub_d](const std::vector<double>& y) {
        const Matrix full = f.hessian(embed(y));
        Matrix out(sub_d);
        for (int r = 0; r < sub_d; ++r)
            for (int c = 0; c < sub_d; ++c) out(r, c) = full(factors[r], factors[c]);
        return out;
    };
    return g;
}

inline Path restrict_factors(const Path& path, const std::vector<int>& factors) {
    Path sub;
    sub.times = path.times;
    for (int i : factors) {
        sub.values.push_back(path.values[i]);
        sub.jump_flags.push_back(path.jump_flags[i]);
    }
    sub.validate();
    return sub;
}

inline void check_support(const SmoothPayoff& term, const std::vector<int>& support,
                          const Path& path) {
    const int d = path.factors();
    for (std::size_t r = 0; r < support.size(); ++r) {
        if (support[r] < 0 || support[r] >= d)
            throw std::invalid_argument("iasu_portfolio: support index out of range");
        if (r > 0 && support[r] <= support[r - 1])
            throw std::invalid_argument("iasu_portfolio: support must be strictly increasing");
    }
    std::vector<char> in_support(d, 0);
    for (int i : support) in_support[i] = 1;
    for (int probe : {0, path.steps() / 2, path.steps()}) {
        const auto g = term.gradient(state_at(path, probe));
        double scale = 0.0;
        for (double v : g) scale = std::max(scale, std::abs(v));
        for (int j = 0; j < d; ++j)
            if (!in_support[j] && std::abs(g[j]) > 1e-9 * (1.0 + scale))
                throw std::invalid_argument(
                    "iasu_portfolio: payoff gradient is nonzero outside its declared support");
    }
}

} // namespace detail

inline Decomposition iasu_portfolio(const std::vector<SmoothPayoff>& terms, const Path& path) {
    if (terms.empty()) throw std::invalid_argument("iasu_portfolio: no terms");
    const int d = path.factors();
    const int n = path.steps();
    for (const auto& term : terms) term.check_dim(d);

    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    std::vector<double> total(n + 1, 0.0);
    const auto anchor = state_at(path, 0);
    for (const auto& term : terms) {
        const auto support = term.effective_support();
        detail::check_support(term, support, path);
        const Path sub_path = detail::restrict_factors(path, support);
        const SmoothPayoff sub_payoff = detail::restrict_payoff(term, support, anchor);
        const Decomposition part = iasu_closed_form(sub_payoff, sub_path);
        for (std::size_t r = 0; r < support.size(); ++r)
            for (int m = 0; m <= n; ++m)
                contrib[support[r]][m] += part.contributions[r][m];
        for (int m = 0; m <= n; ++m) total[m] += part.total[m];
    }

    Decomposition dec;
    dec.method = Method::iasu;
    dec.times = path.times;
    dec.total = std::move(total);
    dec.contributions = std::move(contrib);
    dec.residual.assign(n + 1, 0.0);
    dec.additivity_gap = additivity_gap_series(dec);
    return dec;
}

} // namespace seqdec
