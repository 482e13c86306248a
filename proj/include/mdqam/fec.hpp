#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace mdqam {

inline constexpr double NEG_INF = -1e30;
inline constexpr double LLR_CLAMP = 50.0;

inline double max_star(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b <= NEG_INF / 2) return a;
    return a + std::log1p(std::exp(b - a));
}

// Rate-1/2 feedforward convolutional code, octal generators (13,15), memory 3.
// Generator bits are read MSB-first as coefficients of D^0..D^3, aligned with
// the window (u_t, u_{t-1}, u_{t-2}, u_{t-3}).
class ConvCode {
public:
    static constexpr int kMemory = 3;
    static constexpr int kStates = 8;
    static constexpr unsigned kGen1 = 013;
    static constexpr unsigned kGen2 = 015;

    ConvCode() {
        for (int s = 0; s < kStates; ++s) {
            for (int u = 0; u < 2; ++u) {
                unsigned w = (static_cast<unsigned>(u) << kMemory) | static_cast<unsigned>(s);
                next_[s][u] = static_cast<int>(w >> 1);
                out_[s][u] = static_cast<int>((parity(w & kGen1) << 1) | parity(w & kGen2));
            }
        }
    }

    int next_state(int s, int u) const { return next_[s][u]; }
    int output(int s, int u) const { return out_[s][u]; }  // bit1 = first coded bit

    // zero-tail encoding: appends kMemory zero inputs, output 2*(K+kMemory) bits
    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const {
        std::vector<std::uint8_t> coded;
        coded.reserve(2 * (info.size() + kMemory));
        int s = 0;
        auto push = [&](int u) {
            int o = out_[s][u];
            coded.push_back(static_cast<std::uint8_t>((o >> 1) & 1));
            coded.push_back(static_cast<std::uint8_t>(o & 1));
            s = next_[s][u];
        };
        for (std::uint8_t b : info) push(b & 1);
        for (int t = 0; t < kMemory; ++t) push(0);
        return coded;
    }

    // Log-MAP BCJR over a zero-tail frame. Input: a-priori/channel LLRs of the
    // coded bits, sign convention L = ln(P0/P1). Outputs extrinsic LLRs on the
    // coded bits and a-posteriori LLRs on the info bits (tail excluded).
    // max_log switches max* to plain max.
    void bcjr(std::span<const double> la_coded, std::span<double> le_coded,
              std::span<double> app_info, bool max_log = false) const {
        const std::size_t bits = la_coded.size();
        if (bits % 2 != 0) throw std::invalid_argument("bcjr: odd number of coded-bit LLRs");
        const int T = static_cast<int>(bits / 2);
        const int K = T - kMemory;
        if (K < 1) throw std::invalid_argument("bcjr: frame shorter than the tail");
        if (le_coded.size() != bits) throw std::invalid_argument("bcjr: extrinsic size mismatch");
        if (app_info.size() != static_cast<std::size_t>(K))
            throw std::invalid_argument("bcjr: info size mismatch");

        auto mstar = [max_log](double a, double b) { return max_log ? std::max(a, b) : max_star(a, b); };

        std::vector<double> alpha(static_cast<std::size_t>(T + 1) * kStates, NEG_INF);
        std::vector<double> beta(static_cast<std::size_t>(T + 1) * kStates, NEG_INF);
        alpha[0] = 0.0;
        beta[static_cast<std::size_t>(T) * kStates] = 0.0;

        // branch prior of the two coded bits for each output pair value
        std::vector<double> g(static_cast<std::size_t>(T) * 4);
        for (int t = 0; t < T; ++t) {
            double l1 = la_coded[2 * static_cast<std::size_t>(t)];
            double l2 = la_coded[2 * static_cast<std::size_t>(t) + 1];
            for (int o = 0; o < 4; ++o) {
                double v = ((o & 2) ? -l1 : l1) + ((o & 1) ? -l2 : l2);
                g[static_cast<std::size_t>(t) * 4 + o] = 0.5 * v;
            }
        }

        for (int t = 0; t < T; ++t) {
            const double* at = &alpha[static_cast<std::size_t>(t) * kStates];
            double* an = &alpha[static_cast<std::size_t>(t + 1) * kStates];
            const double* gt = &g[static_cast<std::size_t>(t) * 4];
            const int umax = (t < K) ? 1 : 0;  // tail sections carry u = 0 only
            for (int s = 0; s < kStates; ++s) {
                if (at[s] <= NEG_INF / 2) continue;
                for (int u = 0; u <= umax; ++u) {
                    int ns = next_[s][u];
                    double v = at[s] + gt[out_[s][u]];
                    an[ns] = mstar(an[ns], v);
                }
            }
            double mx = *std::max_element(an, an + kStates);
            for (int s = 0; s < kStates; ++s) an[s] -= mx;
        }

        for (int t = T - 1; t >= 0; --t) {
            const double* bn = &beta[static_cast<std::size_t>(t + 1) * kStates];
            double* bt = &beta[static_cast<std::size_t>(t) * kStates];
            const double* gt = &g[static_cast<std::size_t>(t) * 4];
            const int umax = (t < K) ? 1 : 0;
            for (int s = 0; s < kStates; ++s) {
                double acc = NEG_INF;
                for (int u = 0; u <= umax; ++u)
                    acc = mstar(acc, bn[next_[s][u]] + gt[out_[s][u]]);
                bt[s] = acc;
            }
            double mx = *std::max_element(bt, bt + kStates);
            for (int s = 0; s < kStates; ++s) bt[s] -= mx;
        }

        for (int t = 0; t < T; ++t) {
            const double* at = &alpha[static_cast<std::size_t>(t) * kStates];
            const double* bn = &beta[static_cast<std::size_t>(t + 1) * kStates];
            const double* gt = &g[static_cast<std::size_t>(t) * 4];
            const int umax = (t < K) ? 1 : 0;
            double c1[2] = {NEG_INF, NEG_INF};
            double c2[2] = {NEG_INF, NEG_INF};
            double du[2] = {NEG_INF, NEG_INF};
            for (int s = 0; s < kStates; ++s) {
                if (at[s] <= NEG_INF / 2) continue;
                for (int u = 0; u <= umax; ++u) {
                    int o = out_[s][u];
                    double v = at[s] + gt[o] + bn[next_[s][u]];
                    c1[(o >> 1) & 1] = mstar(c1[(o >> 1) & 1], v);
                    c2[o & 1] = mstar(c2[o & 1], v);
                    du[u] = mstar(du[u], v);
                }
            }
            le_coded[2 * static_cast<std::size_t>(t)] =
                clamp_llr(c1[0] - c1[1] - la_coded[2 * static_cast<std::size_t>(t)]);
            le_coded[2 * static_cast<std::size_t>(t) + 1] =
                clamp_llr(c2[0] - c2[1] - la_coded[2 * static_cast<std::size_t>(t) + 1]);
            if (t < K) app_info[static_cast<std::size_t>(t)] = clamp_llr(du[0] - du[1]);
        }
    }

    // Detour enumeration: for each output weight d <= d_max, the number of
    // error events A_d and their total information weight c_d. Relaxation over
    // (state, weight) converges because the code has no zero-weight cycles.
    struct Spectrum {
        int d_free = 0;
        std::map<int, double> count;        // A_d
        std::map<int, double> info_weight;  // c_d
    };

    Spectrum spectrum(int d_max) const {
        const int W = d_max + 1;
        auto idx = [W](int s, int w) { return static_cast<std::size_t>(s) * W + w; };
        std::vector<double> pc(static_cast<std::size_t>(kStates) * W, 0.0);
        std::vector<double> iw(static_cast<std::size_t>(kStates) * W, 0.0);
        Spectrum out;

        // seed: the diverging branch u=1 from state 0
        {
            int u = 1;
            int s = next_[0][u];
            int w = weight2(out_[0][u]);
            if (w <= d_max) { pc[idx(s, w)] += 1; iw[idx(s, w)] += 1; }
        }
        std::vector<double> npc(pc.size()), niw(iw.size());
        for (int iter = 0; iter < 64 * W; ++iter) {
            std::fill(npc.begin(), npc.end(), 0.0);
            std::fill(niw.begin(), niw.end(), 0.0);
            bool moved = false;
            for (int s = 1; s < kStates; ++s) {
                for (int w = 0; w <= d_max; ++w) {
                    double p = pc[idx(s, w)];
                    if (p == 0.0) continue;
                    double q = iw[idx(s, w)];
                    for (int u = 0; u < 2; ++u) {
                        int ns = next_[s][u];
                        int nw = w + weight2(out_[s][u]);
                        if (nw > d_max) continue;
                        if (ns == 0) {
                            out.count[nw] += p;
                            out.info_weight[nw] += q + u * p;
                        } else {
                            npc[idx(ns, nw)] += p;
                            niw[idx(ns, nw)] += q + u * p;
                            moved = true;
                        }
                    }
                }
            }
            pc.swap(npc);
            iw.swap(niw);
            if (!moved) break;
        }
        for (auto& [d, a] : out.count)
            if (a > 0) { out.d_free = d; break; }
        return out;
    }

    int free_distance() const { return spectrum(16).d_free; }

private:
    static double clamp_llr(double v) { return std::clamp(v, -LLR_CLAMP, LLR_CLAMP); }
    static unsigned parity(unsigned v) { return static_cast<unsigned>(__builtin_popcount(v)) & 1u; }
    static int weight2(int o) { return ((o >> 1) & 1) + (o & 1); }

    int next_[kStates][2];
    int out_[kStates][2];
};

// Seeded random bit interleaver (Fisher-Yates permutation).
class Interleaver {
public:
    Interleaver(std::size_t length, std::uint64_t seed) : perm_(length), seed_(seed) {
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        RngStream rng(seed, 0x1e0f);
        for (std::size_t i = length; i > 1; --i) {
            std::size_t j = rng.below(static_cast<std::uint32_t>(i));
            std::swap(perm_[i - 1], perm_[j]);
        }
    }

    std::size_t size() const { return perm_.size(); }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::size_t>& permutation() const { return perm_; }

    template <typename T>
    void interleave(std::span<const T> in, std::span<T> out) const {
        check(in.size(), out.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = in[perm_[i]];
    }

    template <typename T>
    void deinterleave(std::span<const T> in, std::span<T> out) const {
        check(in.size(), out.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) out[perm_[i]] = in[i];
    }

private:
    void check(std::size_t a, std::size_t b) const {
        if (a != perm_.size() || b != perm_.size())
            throw std::invalid_argument("interleaver: length mismatch");
    }
    std::vector<std::size_t> perm_;
    std::uint64_t seed_;
};

} // namespace mdqam
