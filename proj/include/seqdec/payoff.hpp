#pragma once

// Twice continuously differentiable payoffs with caller-supplied gradient and
// hessian, plus the built-in payoff family used by the tests and the CLI.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace seqdec {

class Matrix {
public:
    Matrix() : n_(0) {}
    explicit Matrix(int n, double fill = 0.0)
        : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

private:
    int n_;
    std::vector<double> a_;
};

// A twice differentiable payoff with explicit first and second derivatives.
// `support` optionally declares the factor subset the payoff truly depends
// on (empty means all of them); portfolio splitting exploits it.
struct SmoothPayoff {
    int dim = 0;
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    std::function<Matrix(const std::vector<double>&)> hessian;
    std::vector<int> support;

    double operator()(const std::vector<double>& x) const { return value(x); }

    // Declared support, or every factor when none was declared.
    std::vector<int> effective_support() const {
        if (!support.empty()) return support;
        std::vector<int> all(dim);
        for (int i = 0; i < dim; ++i) all[i] = i;
        return all;
    }

    void check_dim(int path_factors) const {
        if (dim != path_factors)
            throw std::invalid_argument("payoff expects " + std::to_string(dim) +
                                        " factors, path has " + std::to_string(path_factors));
    }
};

// f(x) = x_1 * ... * x_d.
inline SmoothPayoff product_payoff(int d) {
    if (d < 1) throw std::invalid_argument("product_payoff: dimension must be positive");
    SmoothPayoff f;
    f.dim = d;
    f.value = [](const std::vector<double>& x) {
        double p = 1.0;
        for (double v : x) p *= v;
        return p;
    };
    f.gradient = [d](const std::vector<double>& x) {
        std::vector<double> g(d);
        for (int i = 0; i < d; ++i) {
            double p = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != i) p *= x[j];
            g[i] = p;
        }
        return g;
    };
    f.hessian = [d](const std::vector<double>& x) {
        Matrix h(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i == j) continue;
                double p = 1.0;
                for (int k = 0; k < d; ++k)
                    if (k != i && k != j) p *= x[k];
                h(i, j) = p;
            }
        return h;
    };
    return f;
}

// f(x) = x' Q x / 2 + c' x with symmetric Q.
inline SmoothPayoff quadratic_payoff(Matrix q, std::vector<double> c) {
    const int d = q.size();
    if (d < 1 || static_cast<int>(c.size()) != d)
        throw std::invalid_argument("quadratic_payoff: shape mismatch");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < i; ++j)
            if (q(i, j) != q(j, i))
                throw std::invalid_argument("quadratic_payoff: Q must be symmetric");
    SmoothPayoff f;
    f.dim = d;
    f.value = [q, c, d](const std::vector<double>& x) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) row += q(i, j) * x[j];
            acc += 0.5 * x[i] * row + c[i] * x[i];
        }
        return acc;
    };
    f.gradient = [q, c, d](const std::vector<double>& x) {
        std::vector<double> g(d);
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) row += q(i, j) * x[j];
            g[i] = row + c[i];
        }
        return g;
    };
    f.hessian = [q](const std::vector<double>&) { return q; };
    return f;
}

// The documented default quadratic form used by the CLI registry and tests:
// Q_ij = 1 / (1 + |i - j|), c_i = 0.1 * i  (1-based i).
inline SmoothPayoff default_quadratic_payoff(int d) {
    Matrix q(d);
    std::vector<double> c(d);
    for (int i = 0; i < d; ++i) {
        c[i] = 0.1 * (i + 1);
        for (int j = 0; j < d; ++j) q(i, j) = 1.0 / (1.0 + std::abs(i - j));
    }
    return quadratic_payoff(std::move(q), std::move(c));
}

// f(x) = c' x.
inline SmoothPayoff linear_payoff(std::vector<double> c) {
    const int d = static_cast<int>(c.size());
    if (d < 1) throw std::invalid_argument("linear_payoff: empty coefficients");
    SmoothPayoff f;
    f.dim = d;
    f.value = [c, d](const std::vector<double>& x) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += c[i] * x[i];
        return acc;
    };
    f.gradient = [c](const std::vector<double>&) { return c; };
    f.hessian = [d](const std::vector<double>&) { return Matrix(d); };
    return f;
}

// Pointwise sum of payoffs over the same factor space.
inline SmoothPayoff sum_payoffs(std::vector<SmoothPayoff> terms) {
    if (terms.empty()) throw std::invalid_argument("sum_payoffs: no terms");
    const int d = terms.front().dim;
    for (const auto& t : terms)
        if (t.dim != d) throw std::invalid_argument("sum_payoffs: dimension mismatch");
    SmoothPayoff f;
    f.dim = d;
    f.value = [terms](const std::vector<double>& x) {
        double acc = 0.0;
        for (const auto& t : terms) acc += t.value(x);
        return acc;
    };
    f.gradient = [terms, d](const std::vector<double>& x) {
        std::vector<double> g(d, 0.0);
        for (const auto& t : terms) {
            auto gt = t.gradient(x);
            for (int i = 0; i < d; ++i) g[i] += gt[i];
        }
        return g;
    };
    f.hessian = [terms, d](const std::vector<double>& x) {
        Matrix h(d);
        for (const auto& t : terms) {
            Matrix ht = t.hessian(x);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) h(i, j) += ht(i, j);
        }
        return h;
    };
    return f;
}

// ======================================================================
// Finite-difference cross-checks (central differences)
// ======================================================================

inline double fd_gradient(const SmoothPayoff& f, std::vector<double> x, int i, double h) {
    x[i] += h;
    const double up = f(x);
    x[i] -= 2.0 * h;
    const double dn = f(x);
    return (up - dn) / (2.0 * h);
}

inline double fd_hessian(const SmoothPayoff& f, std::vector<double> x, int i, int j, double h) {
    if (i == j) {
        const double mid = f(x);
        x[i] += h;
        const double up = f(x);
        x[i] -= 2.0 * h;
        const double dn = f(x);
        return (up - 2.0 * mid + dn) / (h * h);
    }
    x[i] += h; x[j] += h;
    const double pp = f(x);
    x[j] -= 2.0 * h;
    const double pm = f(x);
    x[i] -= 2.0 * h;
    const double mm = f(x);
    x[j] += 2.0 * h;
    const double mp = f(x);
    return (pp - pm - mp + mm) / (4.0 * h * h);
}

// Worst relative deviation between callbacks and central differences over the
// supplied states; tests pin this below the required tolerance.
inline double max_derivative_error(const SmoothPayoff& f,
                                   const std::vector<std::vector<double>>& states,
                                   double h_scale = 1e-5) {
    double worst = 0.0;
    for (const auto& x : states) {
        const auto g = f.gradient(x);
        const Matrix hess = f.hessian(x);
        for (int i = 0; i < f.dim; ++i) {
            const double hi = h_scale * (1.0 + std::abs(x[i]));
            const double fd = fd_gradient(f, x, i, hi);
            worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
            for (int j = 0; j <= i; ++j) {
                const double hj = 30.0 * h_scale * (1.0 + std::abs(x[j]));
                const double fdh = fd_hessian(f, x, i, j, std::max(30.0 * h_scale * (1.0 + std::abs(x[i])), hj));
                worst = std::max(worst, std::abs(fdh - hess(i, j)) / (1.0 + std::abs(hess(i, j))));
            }
        }
    }
    return worst;
}

} // namespace seqdec
