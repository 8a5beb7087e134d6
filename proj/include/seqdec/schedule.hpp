#pragma once

// Update schedules: which factors advance when one factor's contribution is
// extracted under an update order pi.
//
// With A the lower-triangular all-ones matrix, the schedule matrices are
//   B_{ij} = A_{pi(i) pi(j)} = 1  iff  pi(j) <= pi(i)      (advance set)
//   C     = B - I,            = 1  iff  pi(j) <  pi(i)      (already advanced)
// Row i of B/C selects the factors sitting at the new grid point when the
// pre/post states of factor i's update are evaluated.  For every i except the
// last factor in pi-order, row B(i,:) coincides with row C(j,:) of the factor
// updated next, which is what makes the decomposition telescope.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqdec {

class PermutationCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kPermutationCap = 8;

inline std::uint64_t factorial(int d) {
    if (d < 0 || d > 20) throw std::invalid_argument("factorial: argument out of range");
    std::uint64_t f = 1;
    for (int k = 2; k <= d; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

// Update order over d factors.  Externally (CLI, printing) a permutation is a
// 1-based image list "pi(1),...,pi(d)"; internally ranks are 0-based.
class Permutation {
public:
    explicit Permutation(const std::vector<int>& one_based_image) {
        const int d = static_cast<int>(one_based_image.size());
        if (d == 0) throw std::invalid_argument("permutation: empty image");
        rank_.assign(d, -1);
        for (int i = 0; i < d; ++i) {
            const int v = one_based_image[i];
            if (v < 1 || v > d) throw std::invalid_argument("permutation: image entry out of range");
            rank_[i] = v - 1;
        }
        std::vector<char> seen(d, 0);
        for (int r : rank_) {
            if (seen[r]) throw std::invalid_argument("permutation: repeated image entry");
            seen[r] = 1;
        }
    }

    static Permutation identity(int d) {
        std::vector<int> img(d);
        std::iota(img.begin(), img.end(), 1);
        return Permutation(img);
    }

    // pi(i) = d + 1 - i: last factor first.
    static Permutation reversal(int d) {
        std::vector<int> img(d);
        for (int i = 0; i < d; ++i) img[i] = d - i;
        return Permutation(img);
    }

    int dim() const { return static_cast<int>(rank_.size()); }

    // 0-based rank of factor i (0-based): position of factor i in the order.
    int rank(int i) const { return rank_[i]; }

    // 0-based factor updated at rank r.
    int factor_at(int r) const {
        for (int i = 0; i < dim(); ++i)
            if (rank_[i] == r) return i;
        throw std::logic_error("permutation: corrupt rank table");
    }

    std::vector<int> image() const {
        std::vector<int> img(rank_.size());
        for (std::size_t i = 0; i < rank_.size(); ++i) img[i] = rank_[i] + 1;
        return img;
    }

    std::string str() const {
        std::ostringstream os;
        const auto img = image();
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (i) os << ",";
            os << img[i];
        }
        return os.str();
    }

    bool operator==(const Permutation& other) const { return rank_ == other.rank_; }

private:
    std::vector<int> rank_;
};

// Accepts "id", "rev", or a comma-separated 1-based image list like "2,1,3".
inline Permutation parse_permutation(const std::string& text, int d) {
    if (text == "id") return Permutation::identity(d);
    if (text == "rev") return Permutation::reversal(d);
    std::vector<int> img;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            img.push_back(std::stoi(cell, &used));
            if (used != cell.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("permutation: bad entry '" + cell + "'");
        }
    }
    if (static_cast<int>(img.size()) != d)
        throw std::invalid_argument("permutation: expected " + std::to_string(d) + " entries");
    return Permutation(img);
}

struct UpdateSchedule {
    Permutation perm;
    int d;
    std::vector<std::uint8_t> b_flat, c_flat;   // row-major d x d

    bool B(int i, int j) const { return b_flat[static_cast<std::size_t>(i) * d + j] != 0; }
    bool C(int i, int j) const { return c_flat[static_cast<std::size_t>(i) * d + j] != 0; }

    static UpdateSchedule build(const Permutation& perm) {
        UpdateSchedule s{perm, perm.dim(), {}, {}};
        s.b_flat.assign(static_cast<std::size_t>(s.d) * s.d, 0);
        s.c_flat.assign(static_cast<std::size_t>(s.d) * s.d, 0);
        for (int i = 0; i < s.d; ++i)
            for (int j = 0; j < s.d; ++j) {
                const bool leq = perm.rank(j) <= perm.rank(i);
                s.b_flat[static_cast<std::size_t>(i) * s.d + j] = leq ? 1 : 0;
                s.c_flat[static_cast<std::size_t>(i) * s.d + j] = (leq && j != i) ? 1 : 0;
            }
        return s;
    }
};

// The order reversing the identity: factor 1 updates last, factor d first.
inline Permutation reverse_identity(int d) { return Permutation::reversal(d); }

inline UpdateSchedule build_schedule(const Permutation& perm) {
    return UpdateSchedule::build(perm);
}

// All permutations of d factors in lexicographic image order.  The cap guards
// the factorial blow-up; callers with a genuine need may raise it explicitly.
inline std::vector<Permutation> all_permutations(int d, int cap = kPermutationCap) {
    if (d < 1) throw std::invalid_argument("all_permutations: dimension must be positive");
    if (d > cap)
        throw PermutationCapExceeded("all_permutations: " + std::to_string(d) +
                                     " factors exceed the enumeration cap " + std::to_string(cap));
    std::vector<int> img(d);
    std::iota(img.begin(), img.end(), 1);
    std::vector<Permutation> out;
    out.reserve(factorial(d));
    do {
        out.emplace_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

} // namespace seqdec
