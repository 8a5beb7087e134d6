#pragma once

// Result type shared by the grid decompositions and their closed-form limits,
// plus CSV serialization.
//
// CSV layout: time,total,D1,...,Dd,residual with an extra additivity_gap
// column for the closed-form methods (isu/ioat/iasu).  The residual column is
// zero-filled except for oat/ioat, whose residual is a first-class series.

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "path.hpp"
#include "payoff.hpp"
#include "schedule.hpp"

namespace seqdec {

enum class Method { su, oat, asu, asu2, isu, ioat, iasu };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::su: return "su";
        case Method::oat: return "oat";
        case Method::asu: return "asu";
        case Method::asu2: return "asu2";
        case Method::isu: return "isu";
        case Method::ioat: return "ioat";
        case Method::iasu: return "iasu";
    }
    throw std::logic_error("method_name: unknown method");
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::su, Method::oat, Method::asu, Method::asu2,
                     Method::isu, Method::ioat, Method::iasu})
        if (s == method_name(m)) return m;
    throw std::invalid_argument("unknown method '" + s + "'");
}

inline bool is_closed_form(Method m) {
    return m == Method::isu || m == Method::ioat || m == Method::iasu;
}

struct Decomposition {
    Method method = Method::su;
    std::optional<Permutation> perm;                 // su / isu only
    std::vector<double> times;
    std::vector<double> total;                       // f(X(t_m)) - f(X(0))
    std::vector<std::vector<double>> contributions;  // [factor][grid index]
    std::vector<double> residual;                    // zero-filled unless oat/ioat
    std::vector<double> additivity_gap;              // closed-form methods only
    std::vector<std::string> labels;                 // optional; defaults to D1..Dd

    int factors() const { return static_cast<int>(contributions.size()); }
    int points() const { return static_cast<int>(times.size()); }

    std::string label(int i) const {
        if (i < static_cast<int>(labels.size())) return labels[i];
        return "D" + std::to_string(i + 1);
    }
};

// Total change series f(X(t_m)) - f(X(0)).
inline std::vector<double> total_change(const SmoothPayoff& f, const Path& path) {
    std::vector<double> total(path.points());
    const double base = f(state_at(path, 0));
    for (int m = 0; m < path.points(); ++m) total[m] = f(state_at(path, m)) - base;
    return total;
}

// total - sum_i D_i, folded over factors in index order.
inline std::vector<double> additivity_gap_series(const Decomposition& dec) {
    std::vector<double> gap(dec.points());
    for (int m = 0; m < dec.points(); ++m) {
        double acc = 0.0;
        for (int i = 0; i < dec.factors(); ++i) acc += dec.contributions[i][m];
        gap[m] = dec.total[m] - acc;
    }
    return gap;
}

inline double max_additivity_gap(const Decomposition& dec) {
    double worst = 0.0;
    for (int m = 0; m < dec.points(); ++m) {
        double acc = 0.0;
        for (int i = 0; i < dec.factors(); ++i) acc += dec.contributions[i][m];
        acc += m < static_cast<int>(dec.residual.size()) ? dec.residual[m] : 0.0;
        worst = std::max(worst, std::abs(dec.total[m] - acc));
    }
    return worst;
}

inline void write_decomposition_csv(const Decomposition& dec, std::ostream& os) {
    const bool gap_column = is_closed_form(dec.method);
    os << "time,total";
    for (int i = 0; i < dec.factors(); ++i) os << "," << dec.label(i);
    os << ",residual";
    if (gap_column) os << ",additivity_gap";
    os << "\n";
    for (int m = 0; m < dec.points(); ++m) {
        os << detail::format_double(dec.times[m]) << "," << detail::format_double(dec.total[m]);
        for (int i = 0; i < dec.factors(); ++i)
            os << "," << detail::format_double(dec.contributions[i][m]);
        os << "," << detail::format_double(dec.residual.empty() ? 0.0 : dec.residual[m]);
        if (gap_column)
            os << "," << detail::format_double(dec.additivity_gap.empty() ? 0.0 : dec.additivity_gap[m]);
        os << "\n";
    }
}

inline void write_decomposition_csv_file(const Decomposition& dec, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw ParseError("cannot open for writing: " + filename);
    write_decomposition_csv(dec, os);
    if (!os) throw ParseError("write failed: " + filename);
}

// Second-order interaction series I_ij(t_m): running sums of
// f_ij(X(t_{l-1})) dX_i dX_j.  Increments where exactly one of the two
// factors is flagged are excluded (a jump against continuous movement carries
// no covariation in the limit); both-flagged increments contribute the jump
// product.  Symmetric in (i, j) by construction.
struct InteractionMatrix {
    int d = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> series;   // [i * d + j][grid index]

    const std::vector<double>& at(int i, int j) const {
        return series[static_cast<std::size_t>(i) * d + j];
    }
    double at(int i, int j, int m) const { return at(i, j)[m]; }
};

inline InteractionMatrix interaction_matrix(const SmoothPayoff& f, const Path& path) {
    f.check_dim(path.factors());
    const int d = path.factors();
    const int n = path.steps();
    InteractionMatrix im;
    im.d = d;
    im.times = path.times;
    im.series.assign(static_cast<std::size_t>(d) * d, std::vector<double>(n + 1, 0.0));
    std::vector<double> prev = state_at(path, 0);
    for (int k = 1; k <= n; ++k) {
        const Matrix h = f.hessian(prev);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                auto& s = im.series[static_cast<std::size_t>(i) * d + j];
                const bool fi = path.jump_flags[i][k], fj = path.jump_flags[j][k];
                double inc = 0.0;
                if (fi == fj) {
                    const double dxi = path.values[i][k] - path.values[i][k - 1];
                    const double dxj = path.values[j][k] - path.values[j][k - 1];
                    inc = h(i, j) * dxi * dxj;
                }
                s[k] = s[k - 1] + inc;
            }
        }
        prev = state_at(path, k);
    }
    return im;
}

// Long-format CSV: time,i,j,I with 1-based factor indices, pairs i <= j
// (the matrix is symmetric).
inline void write_interactions_csv(const InteractionMatrix& im, std::ostream& os) {
    os << "time,i,j,I\n";
    for (int m = 0; m < static_cast<int>(im.times.size()); ++m)
        for (int i = 0; i < im.d; ++i)
            for (int j = i; j < im.d; ++j)
                os << detail::format_double(im.times[m]) << "," << (i + 1) << "," << (j + 1)
                   << "," << detail::format_double(im.at(i, j, m)) << "\n";
}

inline void write_interactions_csv_file(const InteractionMatrix& im, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw ParseError("cannot open for writing: " + filename);
    write_interactions_csv(im, os);
    if (!os) throw ParseError("write failed: " + filename);
}

} // namespace seqdec
