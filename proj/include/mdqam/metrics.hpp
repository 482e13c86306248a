#pragma once
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <thread>
#include <vector>

#include "constellation.hpp"
#include "mapping.hpp"

namespace mdqam {

// Aggregated pair statistics over all (bit position, vector) pairs for one
// feedback variant. Each cell keys the per-coordinate squared distances of
// (x, x_hat) in integer grid units (sorted, zero-padded); every quantity in
// the figure-of-merit family is an exact functional of this histogram:
//   harmonic means   mean of 1 / sum(cell)
//   fast-fading      mean of prod (1 + d_k^2 / 4N0)^-1
//   neighbor counts  group cells by total distance
struct PairSpectrum {
    std::map<std::array<int, 3>, std::uint64_t> cells;
    double unit = 1.0;       // grid-to-normalized factor for squared distances
    std::uint64_t terms = 0; // mN * 2^{mN}
};

enum class Feedback { before, after };

namespace detail {

inline std::array<int, 3> canon_cell(std::array<int, 3> c) {
    std::sort(c.begin(), c.end(), std::greater<int>());
    return c;
}

// per-symbol neighbor lists sorted by squared grid distance (self first)
struct SortedNeighbors {
    std::vector<std::pair<int, int>> by_sym;  // flattened order x order: (d2, sym 0-based)
    int order = 0;
    const std::pair<int, int>* row(int s) const { return &by_sym[static_cast<std::size_t>(s) * order]; }
};

inline SortedNeighbors sorted_neighbors(const Constellation& c) {
    SortedNeighbors out;
    out.order = c.order();
    out.by_sym.resize(static_cast<std::size_t>(out.order) * out.order);
    for (int a = 0; a < out.order; ++a) {
        auto* row = &out.by_sym[static_cast<std::size_t>(a) * out.order];
        for (int b = 0; b < out.order; ++b) {
            double d = std::norm(c.unscaled(a + 1) - c.unscaled(b + 1));
            row[b] = {static_cast<int>(std::llround(d)), b};
        }
        std::sort(row, row + out.order);
    }
    return out;
}

} // namespace detail

// after-feedback variant: x_hat is the unique vector whose label differs in
// exactly the i-th bit
inline PairSpectrum pair_spectrum_after(const MdMapping& map, const Constellation& c) {
    const int mN = map.bits_per_vector();
    const int n = map.dims();
    PairSpectrum out;
    out.unit = c.scale() * c.scale();
    out.terms = static_cast<std::uint64_t>(mN) * map.labels();
    for (std::size_t l = 0; l < map.labels(); ++l) {
        for (int i = 0; i < mN; ++i) {
            std::size_t p = l ^ (std::size_t{1} << i);
            std::array<int, 3> cell{0, 0, 0};
            for (int t = 0; t < n; ++t) {
                double d = std::norm(c.unscaled(map.coord(l, t)) - c.unscaled(map.coord(p, t)));
                cell[static_cast<std::size_t>(t)] = static_cast<int>(std::llround(d));
            }
            ++out.cells[detail::canon_cell(cell)];
        }
    }
    return out;
}

// before-feedback variant: x_hat is the nearest vector whose label differs in
// the i-th bit (whatever the other bits do). Candidates are enumerated in
// increasing vector distance through per-coordinate sorted lists, so the scan
// stops as soon as every bit position has met its nearest complement-set
// member; ties resolve in enumeration order.
inline PairSpectrum pair_spectrum_before(const MdMapping& map, const Constellation& c,
                                         unsigned threads = 0) {
    const int mN = map.bits_per_vector();
    const int n = map.dims();
    const int order = c.order();
    const detail::SortedNeighbors nb = detail::sorted_neighbors(c);

    PairSpectrum out;
    out.unit = c.scale() * c.scale();
    out.terms = static_cast<std::uint64_t>(mN) * map.labels();

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, 16);

    auto worker = [&](std::size_t lo, std::size_t hi,
                      std::map<std::array<int, 3>, std::uint64_t>& cells) {
        using Node = std::pair<int, std::uint32_t>;  // (total d2, packed ranks+last)
        std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
        const std::uint32_t all = (mN >= 32) ? 0xffffffffu : ((1u << mN) - 1);
        for (std::size_t l = lo; l < hi; ++l) {
            int sym[3] = {0, 0, 0};
            for (int t = 0; t < n; ++t) sym[t] = map.coord(l, t) - 1;
            std::uint32_t resolved = 0;
            while (!heap.empty()) heap.pop();
            heap.push({0, 0});
            while (!heap.empty() && resolved != all) {
                auto [d2, packed] = heap.top();
                heap.pop();
                int r[3] = {static_cast<int>(packed & 63), static_cast<int>((packed >> 6) & 63),
                            static_cast<int>((packed >> 12) & 63)};
                int last = static_cast<int>(packed >> 18);
                if (packed != 0) {
                    std::size_t key = 0;
                    for (int t = 0; t < n; ++t)
                        key = key * static_cast<std::size_t>(order) +
                              static_cast<std::size_t>(nb.row(sym[t])[r[t]].second);
                    std::uint32_t lp = map.label_of_key(key);
                    std::uint32_t fresh = (static_cast<std::uint32_t>(l) ^ lp) & ~resolved;
                    if (fresh) {
                        std::array<int, 3> cell{0, 0, 0};
                        for (int t = 0; t < n; ++t) cell[static_cast<std::size_t>(t)] = nb.row(sym[t])[r[t]].first;
                        cells[detail::canon_cell(cell)] += std::popcount(fresh);
                        resolved |= fresh;
                    }
                }
                for (int t = last; t < n; ++t) {
                    if (r[t] + 1 >= order) continue;
                    int nd2 = d2 - nb.row(sym[t])[r[t]].first + nb.row(sym[t])[r[t] + 1].first;
                    std::uint32_t np = packed + (1u << (6 * t));
                    np = (np & ((1u << 18) - 1)) | (static_cast<std::uint32_t>(t) << 18);
                    heap.push({nd2, np});
                }
            }
            if (resolved != all) throw std::logic_error("nearest-complement scan exhausted");
        }
    };

    std::vector<std::map<std::array<int, 3>, std::uint64_t>> parts(threads);
    std::vector<std::thread> pool;
    std::size_t chunk = (map.labels() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        std::size_t lo = w * chunk, hi = std::min(map.labels(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi, std::ref(parts[w]));
    }
    for (auto& t : pool) t.join();
    for (const auto& part : parts)
        for (const auto& [cell, cnt] : part) out.cells[cell] += cnt;
    return out;
}

inline PairSpectrum pair_spectrum(const MdMapping& map, const Constellation& c, Feedback fb,
                                  unsigned threads = 0) {
    return fb == Feedback::after ? pair_spectrum_after(map, c) : pair_spectrum_before(map, c, threads);
}

// --- derived quantities ------------------------------------------------------

inline double harmonic_mean(const PairSpectrum& s) {
    double acc = 0.0;
    for (const auto& [cell, cnt] : s.cells) {
        double d2 = (cell[0] + cell[1] + cell[2]) * s.unit;
        acc += static_cast<double>(cnt) / d2;
    }
    return static_cast<double>(s.terms) / acc;
}

inline double phi_fast(const PairSpectrum& s, double n0) {
    if (n0 <= 0) throw std::invalid_argument("phi_fast: N0 must be positive");
    double acc = 0.0;
    for (const auto& [cell, cnt] : s.cells) {
        double p = 1.0;
        for (int v : cell)
            if (v > 0) p /= 1.0 + v * s.unit / (4.0 * n0);
            else break;  // cells are sorted descending
        acc += static_cast<double>(cnt) * p;
    }
    return static_cast<double>(s.terms) / acc;
}

inline double min_pair_dist_sq(const PairSpectrum& s) {
    double best = 1e300;
    for (const auto& [cell, cnt] : s.cells)
        best = std::min(best, (cell[0] + cell[1] + cell[2]) * s.unit);
    return best;
}

// counts n_i aligned with distance_set_sq(c, N); sums to mN 2^{mN}
inline std::vector<double> n_spectrum(const PairSpectrum& s, const std::vector<double>& dist_sq) {
    std::vector<double> out(dist_sq.size(), 0.0);
    for (const auto& [cell, cnt] : s.cells) {
        double d2 = (cell[0] + cell[1] + cell[2]) * s.unit;
        std::size_t i = 0;
        while (i < dist_sq.size() && std::abs(dist_sq[i] - d2) > 1e-9 * (1 + d2)) ++i;
        if (i == dist_sq.size()) throw std::logic_error("n_spectrum: distance not in distance set");
        out[i] += static_cast<double>(cnt);
    }
    return out;
}

// harmonic mean recomputed from a neighbor spectrum (the identity form)
inline double harmonic_from_spectrum(const std::vector<double>& n, const std::vector<double>& dist_sq,
                                     std::uint64_t terms) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) acc += n[i] / dist_sq[i];
    return static_cast<double>(terms) / acc;
}

// --- direct-scan metrics -----------------------------------------------------

// minimum squared distance between symbol-vectors at Hamming distance one
inline double d_hat_min_sq(const MdMapping& map, const Constellation& c) {
    return min_pair_dist_sq(pair_spectrum_after(map, c));
}

// mean Hamming distance between the labels of vectors at the minimum vector
// distance d1 (each ordered pair counted once)
inline double n_min(const MdMapping& map, const Constellation& c) {
    const int n = map.dims();
    std::uint64_t sum = 0, cnt = 0;
    for (std::size_t l = 0; l < map.labels(); ++l) {
        std::size_t key = map.key_of(l);
        for (int t = 0; t < n; ++t) {
            std::size_t radix = 1;
            for (int u = n - 1; u > t; --u) radix *= static_cast<std::size_t>(c.order());
            int j = map.coord(l, t);
            for (int j2 : c.min_dist_neighbors(j)) {
                std::size_t key2 = key + (static_cast<std::size_t>(j2) - static_cast<std::size_t>(j)) * radix;
                std::uint32_t lp = map.label_of_key(key2);
                sum += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint32_t>(l) ^ lp));
                ++cnt;
            }
        }
    }
    return static_cast<double>(sum) / static_cast<double>(cnt);
}

// full record used by the CLI and the report writer
struct MappingMetrics {
    double n_min = 0;
    double d_hat_min_sq = 0;
    double phi_br_before = 0;
    double phi_br_after = 0;
    std::vector<std::pair<double, double>> phi_fr_before;  // (snr_db, value)
    std::vector<std::pair<double, double>> phi_fr_after;
    std::vector<double> dist_sq;
    std::vector<double> n_before;
    std::vector<double> n_after;
};

inline MappingMetrics compute_metrics(const MdMapping& map, const Constellation& c,
                                      const std::vector<double>& snr_db,
                                      double snr_to_n0_factor, unsigned threads = 0) {
    MappingMetrics r;
    PairSpectrum before = pair_spectrum_before(map, c, threads);
    PairSpectrum after = pair_spectrum_after(map, c);
    r.n_min = n_min(map, c);
    r.d_hat_min_sq = min_pair_dist_sq(after);
    r.phi_br_before = harmonic_mean(before);
    r.phi_br_after = harmonic_mean(after);
    for (double s : snr_db) {
        double n0 = snr_to_n0_factor * std::pow(10.0, -s / 10.0);
        r.phi_fr_before.emplace_back(s, phi_fast(before, n0));
        r.phi_fr_after.emplace_back(s, phi_fast(after, n0));
    }
    r.dist_sq = distance_set_sq(c, map.dims());
    r.n_before = n_spectrum(before, r.dist_sq);
    r.n_after = n_spectrum(after, r.dist_sq);
    return r;
}

} // namespace mdqam
