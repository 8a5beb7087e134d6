#pragma once

// Discretized multivariate cadlag paths on a shared time grid.
//
// A Path holds d factors sampled at grid times t_0 = 0 < t_1 < ... < t_N plus
// per-increment jump flags: jump_flags[i][l] = 1 declares that the increment
// of factor i over (t_{l-1}, t_l] is a pure jump sitting at t_l, so the left
// limit X_i(t_l-) equals the previous grid value exactly.  Unflagged
// increments are treated as continuous movement across the step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqdec {

// Parse/IO failure with position diagnostics; the CLI maps it to exit code 1.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Path {
    std::vector<double> times;                            // size N + 1, times[0] == 0
    std::vector<std::vector<double>> values;              // [factor][grid index]
    std::vector<std::vector<std::uint8_t>> jump_flags;    // same shape, row 0 all zero

    int factors() const { return static_cast<int>(values.size()); }
    int points() const { return static_cast<int>(times.size()); }
    int steps() const { return points() - 1; }

    void validate() const {
        if (times.empty())
            throw std::invalid_argument("path: empty time grid");
        if (times.front() != 0.0)
            throw std::invalid_argument("path: grid must start at time 0");
        for (std::size_t l = 1; l < times.size(); ++l)
            if (!(times[l] > times[l - 1]))
                throw std::invalid_argument("path: grid times must be strictly increasing");
        if (values.empty())
            throw std::invalid_argument("path: no factors");
        if (jump_flags.size() != values.size())
            throw std::invalid_argument("path: jump flag shape mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i].size() != times.size() || jump_flags[i].size() != times.size())
                throw std::invalid_argument("path: ragged factor series");
            if (jump_flags[i][0] != 0)
                throw std::invalid_argument("path: jump flag set at time 0");
            for (double v : values[i])
                if (!std::isfinite(v))
                    throw std::invalid_argument("path: non-finite value");
            for (std::uint8_t f : jump_flags[i])
                if (f > 1)
                    throw std::invalid_argument("path: jump flags must be 0 or 1");
        }
    }
};

// Creates an all-continuous path over the given grid.
inline Path make_path(std::vector<double> times, std::vector<std::vector<double>> values) {
    Path p;
    p.times = std::move(times);
    p.values = std::move(values);
    p.jump_flags.assign(p.values.size(), std::vector<std::uint8_t>(p.times.size(), 0));
    p.validate();
    return p;
}

// Discretized left limit: the previous grid value (exact for flagged jump
// increments, a grid approximation otherwise).  At l = 0 the path starts, so
// X(t_0-) = X(t_0).
inline double left_limit(const Path& path, int factor, int l) {
    return path.values[factor][l > 0 ? l - 1 : 0];
}

inline std::vector<double> state_at(const Path& path, int l) {
    std::vector<double> x(path.factors());
    for (int i = 0; i < path.factors(); ++i) x[i] = path.values[i][l];
    return x;
}

// Mixed state at grid index l: component j sits at the current value when
// beta[j] = 1 and at its left limit otherwise.
inline std::vector<double> star_vector(const Path& path, int l,
                                       const std::vector<std::uint8_t>& beta) {
    if (static_cast<int>(beta.size()) != path.factors())
        throw std::invalid_argument("star_vector: selector length mismatch");
    std::vector<double> x(path.factors());
    for (int j = 0; j < path.factors(); ++j)
        x[j] = beta[j] ? path.values[j][l] : left_limit(path, j, l);
    return x;
}

// Realized covariation estimator sum_{l<=upto} dX_i(l) dX_j(l).
inline double covariation(const Path& path, int i, int j, int upto) {
    if (upto < 0 || upto >= path.points())
        throw std::out_of_range("covariation: grid index out of range");
    double acc = 0.0;
    for (int l = 1; l <= upto; ++l)
        acc += (path.values[i][l] - path.values[i][l - 1]) *
               (path.values[j][l] - path.values[j][l - 1]);
    return acc;
}

// Continuous-part covariation: skips every increment where either factor
// carries a jump flag.
inline double covariation_continuous(const Path& path, int i, int j, int upto) {
    if (upto < 0 || upto >= path.points())
        throw std::out_of_range("covariation_continuous: grid index out of range");
    double acc = 0.0;
    for (int l = 1; l <= upto; ++l) {
        if (path.jump_flags[i][l] || path.jump_flags[j][l]) continue;
        acc += (path.values[i][l] - path.values[i][l - 1]) *
               (path.values[j][l] - path.values[j][l - 1]);
    }
    return acc;
}

// A grid step where two or more factors jump at once, with the jumping set.
struct SimultaneousJumpEvent {
    int grid_index = 0;
    std::vector<int> factors;

    bool operator==(const SimultaneousJumpEvent& other) const {
        return grid_index == other.grid_index && factors == other.factors;
    }
};

inline std::vector<SimultaneousJumpEvent> simultaneous_jumps(const Path& path) {
    std::vector<SimultaneousJumpEvent> hits;
    for (int l = 1; l < path.points(); ++l) {
        std::vector<int> flagged;
        for (int i = 0; i < path.factors(); ++i)
            if (path.jump_flags[i][l]) flagged.push_back(i);
        if (flagged.size() >= 2) hits.push_back({l, std::move(flagged)});
    }
    return hits;
}

inline bool has_simultaneous_jumps(const Path& path) {
    return !simultaneous_jumps(path).empty();
}

// Keeps every stride-th grid point (shared-randomness refinement: the coarse
// path is a restriction of the fine realization).  Restricted to flag-free
// paths; a coarse step absorbing a jump would break the flag semantics.
inline Path restrict_to_stride(const Path& path, int stride) {
    if (stride < 1 || path.steps() % stride != 0)
        throw std::invalid_argument("restrict_to_stride: stride must divide the step count");
    for (const auto& row : path.jump_flags)
        for (std::uint8_t f : row)
            if (f) throw std::invalid_argument("restrict_to_stride: path has jump flags");
    Path out;
    const int n = path.steps() / stride;
    out.times.resize(n + 1);
    out.values.assign(path.factors(), std::vector<double>(n + 1));
    out.jump_flags.assign(path.factors(), std::vector<std::uint8_t>(n + 1, 0));
    for (int l = 0; l <= n; ++l) {
        out.times[l] = path.times[l * stride];
        for (int i = 0; i < path.factors(); ++i)
            out.values[i][l] = path.values[i][l * stride];
    }
    return out;
}

// Stacks paths sharing one grid into a single multivariate path.
inline Path compose(const std::vector<Path>& parts) {
    if (parts.empty()) throw std::invalid_argument("compose: no parts");
    Path out;
    out.times = parts.front().times;
    for (const Path& p : parts) {
        if (p.times != out.times)
            throw std::invalid_argument("compose: parts must share one time grid");
        for (int i = 0; i < p.factors(); ++i) {
            out.values.push_back(p.values[i]);
            out.jump_flags.push_back(p.jump_flags[i]);
        }
    }
    out.validate();
    return out;
}

// ======================================================================
// CSV serialization
//
// Header: time,X1,...,Xd,J1,...,Jd.  One row per grid point; floats carry
// 17 significant digits so values round-trip exactly.
// ======================================================================

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

inline double parse_double(const std::string& cell, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad numeric cell '" + cell + "'");
    }
}

} // namespace detail

inline void write_path_csv(const Path& path, std::ostream& os) {
    const int d = path.factors();
    os << "time";
    for (int i = 1; i <= d; ++i) os << ",X" << i;
    for (int i = 1; i <= d; ++i) os << ",J" << i;
    os << "\n";
    for (int l = 0; l < path.points(); ++l) {
        os << detail::format_double(path.times[l]);
        for (int i = 0; i < d; ++i) os << "," << detail::format_double(path.values[i][l]);
        for (int i = 0; i < d; ++i) os << "," << (path.jump_flags[i][l] ? 1 : 0);
        os << "\n";
    }
}

inline Path read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("line 1: missing path header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_csv_line(line);
    if (header.size() < 3 || header[0] != "time" || header.size() % 2 == 0)
        throw ParseError("line 1: expected header time,X1,...,Xd,J1,...,Jd");
    const int d = static_cast<int>(header.size() - 1) / 2;
    for (int i = 0; i < d; ++i) {
        if (header[1 + i] != "X" + std::to_string(i + 1) ||
            header[1 + d + i] != "J" + std::to_string(i + 1))
            throw ParseError("line 1: expected header time,X1,...,Xd,J1,...,Jd");
    }

    Path path;
    path.values.assign(d, {});
    path.jump_flags.assign(d, {});
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (static_cast<int>(cells.size()) != 1 + 2 * d)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(1 + 2 * d) + " cells, got " +
                             std::to_string(cells.size()));
        path.times.push_back(detail::parse_double(cells[0], line_no));
        for (int i = 0; i < d; ++i)
            path.values[i].push_back(detail::parse_double(cells[1 + i], line_no));
        for (int i = 0; i < d; ++i) {
            const std::string& c = cells[1 + d + i];
            if (c != "0" && c != "1")
                throw ParseError("line " + std::to_string(line_no) + ": jump flag must be 0 or 1");
            path.jump_flags[i].push_back(c == "1" ? 1 : 0);
        }
    }
    try {
        path.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("path csv: ") + e.what());
    }
    return path;
}

inline void write_path_csv_file(const Path& path, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw ParseError("cannot open for writing: " + filename);
    write_path_csv(path, os);
    if (!os) throw ParseError("write failed: " + filename);
}

inline Path read_path_csv_file(const std::string& filename) {
    std::ifstream is(filename);
    if (!is) throw ParseError("cannot open: " + filename);
    return read_path_csv(is);
}

} // namespace seqdec
