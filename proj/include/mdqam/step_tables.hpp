#pragma once
#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "constellation.hpp"

namespace mdqam {

// Per-step symbol-selection and transformation constants of the systematic
// MD mapping construction. alpha[i] lists the position-indexes of the 2^(i+1)
// symbols used at step i; for each step i >= 2 the four beta vectors give the
// transformation applied to a coordinate depending on (parity of w_H(b_i),
// bit value b_i^(k)). beta_e0 is always the identity (equal to alpha[i-1]).
struct StepTables {
    int m = 0;                               // bits per 2-D symbol
    std::vector<int> gamma;                  // QPSK index k -> position-index, k=1..4
    std::vector<std::vector<int>> alpha;     // alpha[i-1] for i = 1..m-1
    struct Betas {
        std::vector<int> e0, e1, o0, o1;
    };
    std::vector<Betas> beta;                 // beta[i-2] for i = 2..m-1

    const std::vector<int>& alpha_at(int i) const { return alpha.at(static_cast<std::size_t>(i - 1)); }
    const Betas& beta_at(int i) const { return beta.at(static_cast<std::size_t>(i - 2)); }
};

inline StepTables step_tables(int m) {
    StepTables t;
    t.m = m;
    if (m == 4) {
        t.gamma = {11, 3, 1, 9};
        t.alpha = {
            {1, 3, 9, 11},
            {1, 2, 3, 4, 9, 10, 11, 12},
            {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16},
        };
        t.beta.resize(2);
        t.beta[0] = {{1, 3, 9, 11}, {2, 4, 10, 12}, {11, 9, 3, 1}, {12, 10, 4, 2}};
        t.beta[1] = {{1, 2, 3, 4, 9, 10, 11, 12},
                     {5, 6, 7, 8, 13, 14, 15, 16},
                     {11, 12, 9, 10, 3, 4, 1, 2},
                     {15, 16, 13, 14, 7, 8, 5, 6}};
    } else if (m == 6) {
        t.gamma = {37, 5, 1, 33};
        std::vector<int> a4, a5;
        for (int j = 1; j <= 64; j += 2) a4.push_back(j);
        for (int j = 1; j <= 64; ++j) a5.push_back(j);
        t.alpha = {
            {1, 5, 33, 37},
            {1, 3, 5, 7, 33, 35, 37, 39},
            {1, 3, 5, 7, 17, 19, 21, 23, 33, 35, 37, 39, 49, 51, 53, 55},
            a4,
            a5,
        };
        t.beta.resize(4);
        t.beta[0] = {{1, 5, 33, 37}, {3, 7, 35, 39}, {37, 33, 5, 1}, {39, 35, 7, 3}};
        t.beta[1] = {{1, 3, 5, 7, 33, 35, 37, 39},
                     {17, 19, 21, 23, 49, 51, 53, 55},
                     {37, 39, 33, 35, 5, 7, 1, 3},
                     {53, 55, 49, 51, 21, 23, 17, 19}};
        t.beta[2] = {{1, 3, 5, 7, 17, 19, 21, 23, 33, 35, 37, 39, 49, 51, 53, 55},
                     {9, 11, 13, 15, 25, 27, 29, 31, 41, 43, 45, 47, 57, 59, 61, 63},
                     {37, 39, 33, 35, 53, 55, 49, 51, 5, 7, 1, 3, 21, 23, 17, 19},
                     {45, 47, 41, 43, 61, 63, 57, 59, 13, 15, 9, 11, 29, 31, 25, 27}};
        std::vector<int> o0 = {37, 39, 33, 35, 45, 47, 41, 43, 53, 55, 49, 51, 61, 63, 57, 59,
                               5,  7,  1,  3,  13, 15, 9,  11, 21, 23, 17, 19, 29, 31, 25, 27};
        std::vector<int> e1, o1;
        for (int j : a4) e1.push_back(j + 1);
        for (int j : o0) o1.push_back(j + 1);
        t.beta[3] = {a4, e1, o0, o1};
    } else {
        throw std::invalid_argument("step_tables: m must be 4 or 6");
    }
    return t;
}

// --- selection-principle verification -------------------------------------

namespace detail {

// Can translated copies of `cells` (grid cells, 0-based (row,col)) partition
// the full side x side grid? Exact cover over all in-grid translates.
inline bool tiles_by_translation(const std::vector<std::pair<int, int>>& cells, int side) {
    const int n = side * side;
    const auto count = static_cast<int>(cells.size());
    if (n % count != 0) return false;
    std::vector<std::uint64_t> placements;
    for (int dr = -side + 1; dr < side; ++dr) {
        for (int dc = -side + 1; dc < side; ++dc) {
            std::uint64_t mask = 0;
            bool ok = true;
            for (auto [r, c] : cells) {
                int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= side || cc < 0 || cc >= side) { ok = false; break; }
                mask |= 1ull << (rr * side + cc);
            }
            if (ok) placements.push_back(mask);
        }
    }
    // depth-first exact cover: always extend at the lowest uncovered cell
    std::vector<std::uint64_t> stack{0};
    const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
    std::set<std::uint64_t> seen;
    while (!stack.empty()) {
        std::uint64_t cover = stack.back();
        stack.pop_back();
        if (cover == full) return true;
        if (!seen.insert(cover).second) continue;
        int low = 0;
        while (cover & (1ull << low)) ++low;
        for (std::uint64_t p : placements)
            if ((p & (1ull << low)) && !(p & cover)) stack.push_back(cover | p);
    }
    return false;
}

inline std::vector<std::pair<int, int>> to_cells(const std::vector<int>& idx, int side) {
    std::vector<std::pair<int, int>> cells;
    cells.reserve(idx.size());
    for (int j : idx) cells.emplace_back((j - 1) / side, (j - 1) % side);
    return cells;
}

inline double set_min_dist_sq(const std::vector<int>& idx, const Constellation& c) {
    double best = 1e300;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            best = std::min(best, std::norm(c.unscaled(idx[a]) - c.unscaled(idx[b])));
    return best;
}

} // namespace detail

struct SelectionReport {
    bool ok = true;
    std::string violations;  // empty when ok

    void fail(const std::string& what) {
        ok = false;
        if (!violations.empty()) violations += "; ";
        violations += what;
    }
};

// Checks the two selection principles behind the alpha tables:
//  (i) translated copies of chi_i cover the constellation exactly once,
// (ii) among tiling candidate sets containing chi_{i-1}, chi_i attains the
//      maximal minimum squared distance. Candidates are enumerated
//      exhaustively for m=4 and over axis-aligned sublattices for m=6.
inline SelectionReport verify_selection_principles(int m, const StepTables& t) {
    SelectionReport rep;
    Constellation c(m, 1);
    const int side = c.side();
    const int M = c.order();

    for (std::size_t step = 0; step < t.alpha.size(); ++step) {
        const int i = static_cast<int>(step) + 1;
        const auto& cur = t.alpha[step];
        if (!detail::tiles_by_translation(detail::to_cells(cur, side), side)) {
            rep.fail("alpha_" + std::to_string(i) + " does not tile the grid");
            continue;
        }
        if (static_cast<int>(cur.size()) == M) continue;  // final step: whole grid

        std::vector<int> prev;  // chi_{i-1}; anchor step 1 at S1
        if (step == 0) prev = {1};
        else prev = t.alpha[step - 1];

        double cur_msed = detail::set_min_dist_sq(cur, c);
        double best = cur_msed;
        std::vector<int> best_set;

        auto consider = [&](const std::vector<int>& cand) {
            for (int j : prev)
                if (!std::binary_search(cand.begin(), cand.end(), j)) return;
            if (!detail::tiles_by_translation(detail::to_cells(cand, side), side)) return;
            double v = detail::set_min_dist_sq(cand, c);
            if (v > best) { best = v; best_set = cand; }
        };

        const int want = static_cast<int>(cur.size());
        if (m == 4) {
            // exhaustive over supersets of chi_{i-1}
            std::vector<int> extra;
            for (int j = 1; j <= M; ++j)
                if (std::find(prev.begin(), prev.end(), j) == prev.end()) extra.push_back(j);
            const int need = want - static_cast<int>(prev.size());
            std::vector<int> pick(static_cast<std::size_t>(need));
            auto rec = [&](auto&& self, int from, int got) -> void {
                if (got == need) {
                    std::vector<int> cand = prev;
                    cand.insert(cand.end(), pick.begin(), pick.end());
                    std::sort(cand.begin(), cand.end());
                    consider(cand);
                    return;
                }
                for (int at = from; at <= static_cast<int>(extra.size()) - (need - got); ++at) {
                    pick[static_cast<std::size_t>(got)] = extra[static_cast<std::size_t>(at)];
                    self(self, at + 1, got + 1);
                }
            };
            rec(rec, 0, 0);
        } else {
            // axis-aligned sublattices: col set {c0 + k*sc} x row set {r0 + k*sr}
            for (int nc = 1; nc <= side; nc <<= 1) {
                int nr = want / nc;
                if (nr < 1 || nr > side || nc * nr != want) continue;
                int sc = side / nc, sr = side / nr;
                for (int c0 = 0; c0 < sc; ++c0)
                    for (int r0 = 0; r0 < sr; ++r0) {
                        std::vector<int> cand;
                        for (int a = 0; a < nr; ++a)
                            for (int b = 0; b < nc; ++b)
                                cand.push_back((r0 + a * sr) * side + (c0 + b * sc) + 1);
                        std::sort(cand.begin(), cand.end());
                        consider(cand);
                    }
            }
        }
        if (best > cur_msed)
            rep.fail("alpha_" + std::to_string(i) + " MSED " + std::to_string(cur_msed) +
                     " beaten by candidate with " + std::to_string(best));
    }
    return rep;
}

} // namespace mdqam
