#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

namespace mdqam {

using cplx = std::complex<double>;

// Square-QAM geometry with the row-major position-index convention:
// position-index j runs 1..M, increasing left to right within a row and
// row by row downwards. Unscaled coordinates sit on the odd-integer grid;
// the stored scale makes the mean energy of an N-symbol vector equal one.
class Constellation {
public:
    Constellation(int bits_per_symbol, int dims_per_vector)
        : m_(bits_per_symbol), n_dims_(dims_per_vector) {
        if (bits_per_symbol != 2 && bits_per_symbol != 4 && bits_per_symbol != 6)
            throw std::invalid_argument("constellation: bits per symbol must be 2, 4 or 6");
        if (dims_per_vector < 1)
            throw std::invalid_argument("constellation: dims must be >= 1");
        if (m_ == 2) {
            // QPSK on the unit circle, P_k = e^{j pi k / 2}, k = 1..4
            grid_ = {cplx(0, 1), cplx(-1, 0), cplx(0, -1), cplx(1, 0)};
        } else {
            int side = 1 << (m_ / 2);
            grid_.reserve(static_cast<std::size_t>(side) * side);
            for (int r = 0; r < side; ++r)
                for (int c = 0; c < side; ++c)
                    grid_.emplace_back(-(side - 1) + 2 * c, (side - 1) - 2 * r);
        }
        double e = 0.0;
        for (const cplx& p : grid_) e += std::norm(p);
        e /= static_cast<double>(grid_.size());
        scale_ = 1.0 / std::sqrt(e * n_dims_);
        scaled_.resize(grid_.size());
        for (std::size_t j = 0; j < grid_.size(); ++j) scaled_[j] = grid_[j] * scale_;
    }

    int bits() const { return m_; }
    int order() const { return static_cast<int>(grid_.size()); }
    int side() const { return m_ == 2 ? 0 : 1 << (m_ / 2); }
    int dims() const { return n_dims_; }
    double scale() const { return scale_; }

    // 1-based position-index
    cplx symbol(int j) const {
        if (j < 1 || j > order()) throw std::out_of_range("symbol: position-index out of range");
        return scaled_[static_cast<std::size_t>(j - 1)];
    }
    cplx unscaled(int j) const {
        if (j < 1 || j > order()) throw std::out_of_range("symbol: position-index out of range");
        return grid_[static_cast<std::size_t>(j - 1)];
    }
    const std::vector<cplx>& symbols() const { return scaled_; }

    double sym_dist_sq(int a, int b) const { return std::norm(symbol(a) - symbol(b)); }

    // distinct nonzero squared distances of the 2-D set, ascending
    std::vector<double> dist_sq_2d() const {
        std::set<long long> seen;
        for (std::size_t a = 0; a < grid_.size(); ++a)
            for (std::size_t b = a + 1; b < grid_.size(); ++b) {
                double d = std::norm(grid_[a] - grid_[b]);
                seen.insert(static_cast<long long>(std::llround(d)));
            }
        std::vector<double> out;
        out.reserve(seen.size());
        for (long long v : seen) out.push_back(static_cast<double>(v) * scale_ * scale_);
        return out;
    }

    double min_dist_sq() const { return dist_sq_2d().front(); }

    // position-indexes of the 2-D symbols at minimum distance from j
    std::vector<int> min_dist_neighbors(int j) const {
        std::vector<int> out;
        if (m_ == 2) {
            int k = j;  // adjacent QPSK phases
            out.push_back(k % 4 + 1);
            out.push_back((k + 2) % 4 + 1);
            std::sort(out.begin(), out.end());
            return out;
        }
        int s = side();
        int r = (j - 1) / s, c = (j - 1) % s;
        if (c + 1 < s) out.push_back(r * s + c + 2);
        if (c - 1 >= 0) out.push_back(r * s + c);
        if (r + 1 < s) out.push_back((r + 1) * s + c + 1);
        if (r - 1 >= 0) out.push_back((r - 1) * s + c + 1);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int m_;
    int n_dims_;
    double scale_ = 1.0;
    std::vector<cplx> grid_;
    std::vector<cplx> scaled_;
};

// Unit-circle QPSK reference, P_k = e^{j pi k / 2}: P1=(0,1), P2=(-1,0),
// P3=(0,-1), P4=(1,0).
inline cplx qpsk_point(int k) {
    static const std::array<cplx, 4> pts = {cplx(0, 1), cplx(-1, 0), cplx(0, -1), cplx(1, 0)};
    if (k < 1 || k > 4) throw std::out_of_range("qpsk_point: k in 1..4");
    return pts[static_cast<std::size_t>(k - 1)];
}

// All attainable nonzero squared Euclidean distances between two points of
// chi^N, ascending. Vector distances decompose into per-coordinate sums, so
// the set is built from sums of N values drawn from {0} + the 2-D set.
inline std::vector<double> distance_set_sq(const Constellation& c, int n_dims) {
    std::vector<double> d2 = c.dist_sq_2d();
    std::set<long long> sums{0};
    double unit = c.scale() * c.scale();
    for (int t = 0; t < n_dims; ++t) {
        std::set<long long> next;
        for (long long s : sums) {
            next.insert(s);
            for (double v : d2) next.insert(s + static_cast<long long>(std::llround(v / unit)));
        }
        sums.swap(next);
    }
    sums.erase(0);
    std::vector<double> out;
    out.reserve(sums.size());
    for (long long v : sums) out.push_back(static_cast<double>(v) * unit);
    return out;
}

inline std::vector<double> distance_set(const Constellation& c, int n_dims) {
    std::vector<double> out = distance_set_sq(c, n_dims);
    for (double& v : out) v = std::sqrt(v);
    return out;
}

} // namespace mdqam
