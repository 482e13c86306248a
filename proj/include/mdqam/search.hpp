#pragma once
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "constellation.hpp"
#include "mapping.hpp"
#include "metrics.hpp"

namespace mdqam {

enum class Objective {
    max_phi_hat_br,  // harmonic mean after feedback
    max_phi_br,      // harmonic mean before feedback (global recompute, slow)
    min_n_min,
    max_d_hat,       // Hamming-1 MSED, ties broken by the harmonic sum
    weighted,
};

inline Objective objective_from_string(const std::string& s) {
    if (s == "phi-hat-br") return Objective::max_phi_hat_br;
    if (s == "phi-br") return Objective::max_phi_br;
    if (s == "n-min") return Objective::min_n_min;
    if (s == "d-hat") return Objective::max_d_hat;
    if (s == "weighted") return Objective::weighted;
    throw std::invalid_argument("unknown cost objective: " + s);
}

struct SearchConfig {
    Objective cost = Objective::max_phi_hat_br;
    std::uint64_t seed = 1;
    std::size_t budget = 1u << 20;  // committed swaps (bsa) or candidates K (random)
    // weights for Objective::weighted over {1/phi_hat_br, n_min, -d_hat}
    double w_phi_hat = 1.0, w_n_min = 0.0, w_d_hat = 0.0;
};

// cost tuple, lower is better; `a` is the primary scalar written to traces
struct SearchCost {
    double a = 0, b = 0;
    bool less_than(const SearchCost& o, double rel = 1e-9) const {
        double ea = rel * (1 + std::abs(a) + std::abs(o.a));
        if (a < o.a - ea) return true;
        if (a > o.a + ea) return false;
        double eb = rel * (1 + std::abs(b) + std::abs(o.b));
        return b < o.b - eb;
    }
};

namespace detail {

// Mutable label<->vector assignment with incrementally maintained pair
// statistics: a histogram of Hamming-1 pair distances (integer grid units),
// their inverse-square sum, and the Hamming-distance sum over geometric
// minimum-distance vector pairs. A label swap touches at most O(mN) pairs.
class SwapEngine {
public:
    SwapEngine(const MdMapping& map, const Constellation& cons, bool track_hist = true,
               bool track_nmin = true)
        : m_(map.bits_per_symbol()), n_(map.dims()), order_(cons.order()), mn_(m_ * n_),
          labels_(map.labels()), c_(&cons), idx_(map.table()), track_hist_(track_hist),
          track_nmin_(track_nmin) {
        unit_ = cons.scale() * cons.scale();
        inverse_.assign(pow_order(), MdMapping::npos);
        for (std::size_t l = 0; l < labels_; ++l) inverse_[key_of(l)] = static_cast<std::uint32_t>(l);

        // cache geometric neighbor index offsets once; d1 neighbors differ in
        // exactly one coordinate
        nb_.assign(static_cast<std::size_t>(order_) + 1, {});
        for (int j = 1; j <= order_; ++j) nb_[static_cast<std::size_t>(j)] = c_->min_dist_neighbors(j);
        radix_.assign(static_cast<std::size_t>(n_), 1);
        for (int t = n_ - 2; t >= 0; --t)
            radix_[static_cast<std::size_t>(t)] = radix_[static_cast<std::size_t>(t + 1)] * static_cast<std::size_t>(order_);

        for (std::size_t l = 0; l < labels_; ++l)
            for (int i = 0; i < mn_; ++i) {
                std::size_t p = l ^ (std::size_t{1} << i);
                if (p < l) continue;  // unordered
                long long d = grid_dist(l, p);
                if (track_hist_) ++h1_hist_[d];
                h1_inv_ += 1.0 / (static_cast<double>(d) * unit_);
            }
        nmin_sum_ = 0;
        geom_count_ = 0;
        if (track_nmin_) {
            for_each_geom_pair([&](std::size_t la, std::size_t lb) {
                nmin_sum_ += std::popcount(static_cast<std::uint32_t>(la) ^ static_cast<std::uint32_t>(lb));
                ++geom_count_;
            });
        }
    }

    int bits_per_vector() const { return mn_; }
    std::size_t labels() const { return labels_; }

    double h1_inv_sum_ordered() const { return 2.0 * h1_inv_; }
    double h1_min_dist_sq() const { return static_cast<double>(h1_hist_.begin()->first) * unit_; }
    // the unordered geometric pair count is invariant under label swaps
    double nmin_value() const { return static_cast<double>(nmin_sum_) / static_cast<double>(geom_count_); }

    // swap the vectors assigned to labels a and b, maintaining statistics
    void swap_labels(std::size_t a, std::size_t b) {
        remove_stats(a, b);
        for (int t = 0; t < n_; ++t)
            std::swap(idx_[a * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)],
                      idx_[b * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)]);
        inverse_[key_of(a)] = static_cast<std::uint32_t>(a);
        inverse_[key_of(b)] = static_cast<std::uint32_t>(b);
        add_stats(a, b);
    }

    MdMapping freeze(const std::string& prov, std::uint64_t seed) const {
        return MdMapping(m_, n_, idx_, prov, seed);
    }

    const Constellation& cons() const { return *c_; }

private:
    std::size_t pow_order() const {
        std::size_t k = 1;
        for (int t = 0; t < n_; ++t) k *= static_cast<std::size_t>(order_);
        return k;
    }
    std::size_t key_of(std::size_t l) const {
        std::size_t key = 0;
        for (int t = 0; t < n_; ++t)
            key = key * static_cast<std::size_t>(order_) +
                  static_cast<std::size_t>(idx_[l * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)] - 1);
        return key;
    }
    long long grid_dist(std::size_t a, std::size_t b) const {
        double d = 0;
        for (int t = 0; t < n_; ++t)
            d += std::norm(c_->unscaled(idx_[a * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)]) -
                           c_->unscaled(idx_[b * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)]));
        return std::llround(d);
    }

    template <typename F>
    void for_each_geom_pair(F&& f) const {  // unordered geometric d1 pairs
        for (std::size_t l = 0; l < labels_; ++l) {
            std::size_t key = key_of(l);
            for (int t = 0; t < n_; ++t) {
                int j = idx_[l * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)];
                for (int j2 : nb_[static_cast<std::size_t>(j)]) {
                    if (j2 < j) continue;
                    std::uint32_t lp = inverse_[key + (static_cast<std::size_t>(j2) - static_cast<std::size_t>(j)) *
                                                          radix_[static_cast<std::size_t>(t)]];
                    f(l, static_cast<std::size_t>(lp));
                }
            }
        }
    }

    // Visit every unordered Hamming-1 pair touching label a or b exactly once.
    // The only possible duplicate is the (a,b) pair itself when dH(a,b)=1.
    template <typename F>
    void visit_h1(std::size_t a, std::size_t b, F&& f) const {
        bool adjacent = std::popcount(a ^ b) == 1;
        for (int i = 0; i < mn_; ++i) f(a, a ^ (std::size_t{1} << i));
        for (int i = 0; i < mn_; ++i) {
            std::size_t p = b ^ (std::size_t{1} << i);
            if (adjacent && p == a) continue;
            f(b, p);
        }
    }

    // Visit unordered geometric d1 pairs incident to the vectors at labels
    // a or b. The (a,b) pair is invariant under the swap and skipped; it is
    // also the only candidate duplicate since d1 neighbors differ in exactly
    // one coordinate.
    template <typename F>
    void visit_geom(std::size_t a, std::size_t b, F&& f) const {
        for (std::size_t l : {a, b}) {
            std::size_t other = (l == a) ? b : a;
            std::size_t key = key_of(l);
            for (int t = 0; t < n_; ++t) {
                int j = idx_[l * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)];
                for (int j2 : nb_[static_cast<std::size_t>(j)]) {
                    std::size_t lp = inverse_[key + (static_cast<std::size_t>(j2) - static_cast<std::size_t>(j)) *
                                                        radix_[static_cast<std::size_t>(t)]];
                    if (lp == other) continue;
                    f(l, lp);
                }
            }
        }
    }

    void remove_stats(std::size_t a, std::size_t b) {
        visit_h1(a, b, [&](std::size_t x, std::size_t y) {
            long long d = grid_dist(x, y);
            if (track_hist_) {
                auto it = h1_hist_.find(d);
                if (--it->second == 0) h1_hist_.erase(it);
            }
            h1_inv_ -= 1.0 / (static_cast<double>(d) * unit_);
        });
        if (track_nmin_)
            visit_geom(a, b, [&](std::size_t x, std::size_t y) {
                nmin_sum_ -= std::popcount(static_cast<std::uint32_t>(x) ^ static_cast<std::uint32_t>(y));
            });
    }

    void add_stats(std::size_t a, std::size_t b) {
        visit_h1(a, b, [&](std::size_t x, std::size_t y) {
            long long d = grid_dist(x, y);
            if (track_hist_) ++h1_hist_[d];
            h1_inv_ += 1.0 / (static_cast<double>(d) * unit_);
        });
        if (track_nmin_)
            visit_geom(a, b, [&](std::size_t x, std::size_t y) {
                nmin_sum_ += std::popcount(static_cast<std::uint32_t>(x) ^ static_cast<std::uint32_t>(y));
            });
    }

    int m_, n_, order_, mn_;
    std::size_t labels_;
    const Constellation* c_;
    std::vector<std::uint8_t> idx_;
    std::vector<std::uint32_t> inverse_;
    double unit_;
    std::map<long long, std::int64_t> h1_hist_;
    double h1_inv_ = 0;
    std::int64_t nmin_sum_ = 0;
    std::uint64_t geom_count_ = 0;
    mutable std::vector<std::pair<std::size_t, std::size_t>> scratch_;
};

inline double phi_br_inv_sum(const SwapEngine& eng, std::uint64_t seed) {
    MdMapping snap = eng.freeze("tmp", seed);
    PairSpectrum sp = pair_spectrum_before(snap, eng.cons(), 1);
    double acc = 0;
    for (const auto& [cell, cnt] : sp.cells)
        acc += static_cast<double>(cnt) / ((cell[0] + cell[1] + cell[2]) * sp.unit);
    return acc;
}

inline SearchCost eval_cost(const SwapEngine& eng, const SearchConfig& cfg) {
    switch (cfg.cost) {
        case Objective::max_phi_hat_br: return {eng.h1_inv_sum_ordered(), 0};
        case Objective::max_phi_br: return {phi_br_inv_sum(eng, cfg.seed), 0};
        case Objective::min_n_min: return {eng.nmin_value(), 0};
        case Objective::max_d_hat: return {-eng.h1_min_dist_sq(), eng.h1_inv_sum_ordered()};
        case Objective::weighted: {
            double terms = static_cast<double>(eng.labels()) * eng.bits_per_vector();
            return {cfg.w_phi_hat * (eng.h1_inv_sum_ordered() / terms) +
                        cfg.w_n_min * eng.nmin_value() - cfg.w_d_hat * eng.h1_min_dist_sq(),
                    0};
        }
    }
    throw std::logic_error("eval_cost: bad objective");
}

// per-vector contribution to the objective, used to pick pivots
inline std::vector<double> per_symbol_cost(const SwapEngine& eng, const MdMapping& snap,
                                           const Constellation& c, const SearchConfig& cfg) {
    const int mn = snap.bits_per_vector();
    std::vector<double> out(snap.labels(), 0.0);
    auto vec_d2 = [&](std::size_t a, std::size_t b) {
        double d = 0;
        for (int t = 0; t < snap.dims(); ++t)
            d += std::norm(c.symbol(snap.coord(a, t)) - c.symbol(snap.coord(b, t)));
        return d;
    };
    if (cfg.cost == Objective::min_n_min) {
        for (std::size_t l = 0; l < snap.labels(); ++l) {
            std::size_t key = snap.key_of(l);
            double v = 0;
            for (int t = 0; t < snap.dims(); ++t) {
                std::size_t radix = 1;
                for (int u = snap.dims() - 1; u > t; --u) radix *= static_cast<std::size_t>(c.order());
                int j = snap.coord(l, t);
                for (int j2 : c.min_dist_neighbors(j)) {
                    std::uint32_t lp = snap.label_of_key(key + (static_cast<std::size_t>(j2) - static_cast<std::size_t>(j)) * radix);
                    v += std::popcount(static_cast<std::uint32_t>(l) ^ lp);
                }
            }
            out[l] = v;
        }
        return out;
    }
    const bool min_only = (cfg.cost == Objective::max_d_hat);
    double dmin = min_only ? eng.h1_min_dist_sq() : 0;
    for (std::size_t l = 0; l < snap.labels(); ++l) {
        double v = 0;
        for (int i = 0; i < mn; ++i) {
            double d = vec_d2(l, l ^ (std::size_t{1} << i));
            if (min_only)
                v += (d <= dmin * (1 + 1e-9)) ? 1.0 : 1e-6 / d;
            else
                v += 1.0 / d;
        }
        out[l] = v;
    }
    return out;
}

} // namespace detail

struct BsaTraceRow {
    std::size_t step;
    std::size_t label_a, label_b;
    double cost_before, cost_after;
};

struct BsaResult {
    MdMapping mapping;
    std::vector<BsaTraceRow> trace;
    bool budget_exhausted = false;
};

// Binary switch algorithm. Vectors are ranked by their contribution to the
// objective; starting from the highest-cost vector, every label swap against
// the pivot is tried and the best strictly improving one is committed. The
// search stops at a local optimum (no pivot has an improving swap) or when
// the swap budget runs out. Ties break toward the lowest label index.
inline BsaResult bsa(const MdMapping& init, const Constellation& cons, const SearchConfig& cfg) {
    detail::SwapEngine eng(init, cons);
    BsaResult res{init, {}, false};

    SearchCost cur = detail::eval_cost(eng, cfg);
    std::size_t committed = 0;
    const bool slow = (cfg.cost == Objective::max_phi_br);

    while (true) {
        MdMapping snap = eng.freeze("bsa-scan", cfg.seed);
        std::vector<double> pcost = detail::per_symbol_cost(eng, snap, cons, cfg);
        std::vector<std::size_t> order(snap.labels());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pcost[a] > pcost[b]; });

        bool improved = false;
        for (std::size_t pivot : order) {
            SearchCost best = cur;
            std::size_t best_other = pivot;
            for (std::size_t other = 0; other < snap.labels(); ++other) {
                if (other == pivot) continue;
                eng.swap_labels(pivot, other);
                SearchCost cand = detail::eval_cost(eng, cfg);
                eng.swap_labels(pivot, other);
                if (cand.less_than(best)) {
                    best = cand;
                    best_other = other;
                }
            }
            if (best_other != pivot) {
                eng.swap_labels(pivot, best_other);
                res.trace.push_back({committed, pivot, best_other, cur.a, best.a});
                cur = best;
                improved = true;
                ++committed;
                break;
            }
            if (slow) break;  // one pivot per pass keeps the slow objective usable
        }
        if (!improved) break;
        if (committed >= cfg.budget) {
            res.budget_exhausted = true;
            break;
        }
    }
    res.mapping = eng.freeze("bsa", cfg.seed);
    return res;
}

// best of K seeded random mappings under the configured objective;
// deterministic in (seed, K) and independent of evaluation order
inline MdMapping random_search(int m, int n_dims, std::size_t k, const SearchConfig& cfg,
                               const Constellation& cons) {
    if (k < 1) throw std::invalid_argument("random_search: K must be >= 1");
    SearchCost best{std::numeric_limits<double>::max(), 0};
    MdMapping best_map = random_mapping(m, n_dims, cfg.seed);
    for (std::size_t i = 0; i < k; ++i) {
        MdMapping cand = random_mapping(m, n_dims, cfg.seed + i);
        detail::SwapEngine eng(cand, cons);
        SearchCost c = detail::eval_cost(eng, cfg);
        if (c.less_than(best)) {
            best = c;
            best_map = std::move(cand);
        }
    }
    return best_map;
}

} // namespace mdqam
