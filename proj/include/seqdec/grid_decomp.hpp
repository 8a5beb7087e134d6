#pragma once

// Exact grid decompositions of f(X(t)) - f(X(0)).
//
// Sequential-update (SU) walks the factors through each grid step in
// permutation order and charges every factor the payoff change its own update
// causes.  One-at-a-time (OAT) moves each factor alone from the common step
// base, leaving an unexplained residual.  Averaged-SU (ASU) is the mean of SU
// over all orderings; asu2 averages just the identity and reversal orders.

#include <atomic>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include "decomposition.hpp"
#include "path.hpp"
#include "payoff.hpp"
#include "schedule.hpp"

namespace seqdec {

namespace detail {

// Per-factor cumulative SU contributions, factor-major.  The in-place walk
// visits exactly the stopped states the B/C update matrices describe: before
// factor i moves, every factor of lower rank is already at the new grid row,
// so the bracket for i is the payoff change across its own update.
inline std::vector<std::vector<double>> su_contributions(const SmoothPayoff& f, const Path& path,
                                                         const Permutation& perm) {
    const int d = path.factors();
    const int n = path.steps();
    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    std::vector<int> order(d);
    for (int r = 0; r < d; ++r) order[r] = perm.factor_at(r);

    std::vector<double> state = state_at(path, 0);
    double f_prev = f(state);
    for (int k = 1; k <= n; ++k) {
        for (int i : order) {
            state[i] = path.values[i][k];
            const double f_cur = f(state);
            contrib[i][k] = contrib[i][k - 1] + (f_cur - f_prev);
            f_prev = f_cur;
        }
    }
    return contrib;
}

inline Decomposition make_decomposition(Method method, const Path& path,
                                        const SmoothPayoff& f,
                                        std::vector<std::vector<double>> contributions,
                                        std::optional<Permutation> perm = std::nullopt) {
    Decomposition dec;
    dec.method = method;
    dec.perm = std::move(perm);
    dec.times = path.times;
    dec.total = total_change(f, path);
    dec.contributions = std::move(contributions);
    dec.residual.assign(path.points(), 0.0);
    return dec;
}

} // namespace detail

inline Decomposition su_decompose(const SmoothPayoff& f, const Path& path,
                                      const Permutation& perm) {
    f.check_dim(path.factors());
    if (perm.dim() != path.factors())
        throw std::invalid_argument("su_decompose: permutation dimension mismatch");
    return detail::make_decomposition(Method::su, path, f,
                                      detail::su_contributions(f, path, perm), perm);
}

inline Decomposition oat_decompose(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    const int d = path.factors();
    const int n = path.steps();
    std::vector<std::vector<double>> contrib(d, std::vector<double>(n + 1, 0.0));
    std::vector<double> state = state_at(path, 0);
    double f_base = f(state);
    for (int k = 1; k <= n; ++k) {
        for (int i = 0; i < d; ++i) {
            const double kept = state[i];
            state[i] = path.values[i][k];
            contrib[i][k] = contrib[i][k - 1] + (f(state) - f_base);
            state[i] = kept;
        }
        state = state_at(path, k);
        f_base = f(state);
    }
    auto dec = detail::make_decomposition(Method::oat, path, f, std::move(contrib));
    for (int m = 0; m < dec.points(); ++m) {
        double explained = 0.0;
        for (int i = 0; i < d; ++i) explained += dec.contributions[i][m];
        dec.residual[m] = dec.total[m] - explained;
    }
    return dec;
}

namespace detail {

// Orders are processed in fixed blocks and the block partials are folded in
// block order, so the thread count never changes a single output bit.
inline constexpr int kAsuBlockSize = 120;

} // namespace detail

inline Decomposition asu_decompose(const SmoothPayoff& f, const Path& path, int jobs = 1) {
    f.check_dim(path.factors());
    const int d = path.factors();
    const int n = path.steps();
    const auto perms = all_permutations(d);
    const int n_perms = static_cast<int>(perms.size());
    const int n_blocks = (n_perms + detail::kAsuBlockSize - 1) / detail::kAsuBlockSize;

    std::vector<std::vector<std::vector<double>>> block_sums(n_blocks);
    auto run_block = [&](int b) {
        std::vector<std::vector<double>> acc(d, std::vector<double>(n + 1, 0.0));
        const int lo = b * detail::kAsuBlockSize;
        const int hi = std::min(lo + detail::kAsuBlockSize, n_perms);
        for (int p = lo; p < hi; ++p) {
            const auto contrib = detail::su_contributions(f, path, perms[p]);
            for (int i = 0; i < d; ++i)
                for (int m = 0; m <= n; ++m) acc[i][m] += contrib[i][m];
        }
        block_sums[b] = std::move(acc);
    };

    if (jobs <= 1 || n_blocks == 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int workers = std::min(jobs, n_blocks);
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    const double inv = 1.0 / static_cast<double>(n_perms);
    std::vector<std::vector<double>> mean(d, std::vector<double>(n + 1, 0.0));
    for (int b = 0; b < n_blocks; ++b)
        for (int i = 0; i < d; ++i)
            for (int m = 0; m <= n; ++m) mean[i][m] += block_sums[b][i][m];
    for (int i = 0; i < d; ++i)
        for (int m = 0; m <= n; ++m) mean[i][m] *= inv;
    return detail::make_decomposition(Method::asu, path, f, std::move(mean));
}

// Averages only the identity and reversal orders.  For two factors this spans
// the whole order space, so it reproduces asu exactly.
inline Decomposition asu_two_perm(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    const int d = path.factors();
    const int n = path.steps();
    const auto fwd = detail::su_contributions(f, path, Permutation::identity(d));
    const auto rev = detail::su_contributions(f, path, Permutation::reversal(d));
    std::vector<std::vector<double>> mean(d, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < d; ++i)
        for (int m = 0; m <= n; ++m) mean[i][m] = (fwd[i][m] + rev[i][m]) * 0.5;
    return detail::make_decomposition(Method::asu2, path, f, std::move(mean));
}

} // namespace seqdec
