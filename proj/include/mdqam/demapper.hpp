#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "constellation.hpp"
#include "fec.hpp"
#include "mapping.hpp"

namespace mdqam {

// MAP soft demapper over a full 2^{mN} hypothesis enumeration. Channel
// metrics decompose per coordinate, so each received vector costs N tables
// of 2^m squared distances plus one table-sum sweep over the hypotheses.
class Demapper {
public:
    Demapper(const MdMapping& map, const Constellation& c) : map_(&map), c_(&c) {
        m_ = map.bits_per_symbol();
        n_ = map.dims();
        mn_ = m_ * n_;
        labels_ = map.labels();
        lo_bits_ = mn_ / 2;
        hi_bits_ = mn_ - lo_bits_;
    }

    struct Workspace {
        std::vector<double> chan;       // n * order channel metrics
        std::vector<double> prior_lo;   // 2^{lo_bits} prior half-sums
        std::vector<double> prior_hi;   // 2^{hi_bits}
        std::vector<double> acc0, acc1; // per-bit accumulators
    };

    Workspace make_workspace() const {
        Workspace w;
        w.chan.resize(static_cast<std::size_t>(n_) * c_->order());
        w.prior_lo.resize(std::size_t{1} << lo_bits_);
        w.prior_hi.resize(std::size_t{1} << hi_bits_);
        w.acc0.resize(static_cast<std::size_t>(mn_));
        w.acc1.resize(static_cast<std::size_t>(mn_));
        return w;
    }

    // Extrinsic LLRs for the mN bits of one received vector. la/le are in
    // label bit order (bit 1 = MSB first). Exact log-domain by default.
    void demap(std::span<const cplx> y, std::span<const cplx> h, double n0,
               std::span<const double> la, std::span<double> le, Workspace& w,
               bool max_log = false) const {
        if (la.size() != static_cast<std::size_t>(mn_) || le.size() != static_cast<std::size_t>(mn_))
            throw std::invalid_argument("demap: LLR block must hold mN values");
        if (y.size() != static_cast<std::size_t>(n_) || h.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("demap: vector length mismatch");
        if (n0 <= 0) throw std::invalid_argument("demap: N0 must be positive");

        const int order = c_->order();
        const auto& sym = c_->symbols();
        for (int t = 0; t < n_; ++t) {
            double* row = &w.chan[static_cast<std::size_t>(t) * order];
            for (int s = 0; s < order; ++s)
                row[s] = -std::norm(y[static_cast<std::size_t>(t)] -
                                    h[static_cast<std::size_t>(t)] * sym[static_cast<std::size_t>(s)]) /
                         n0;
        }

        // prior half-sums: label bit k (1-based from MSB) contributes +- la/2
        fill_prior(w.prior_hi, la.subspan(0, static_cast<std::size_t>(hi_bits_)));
        fill_prior(w.prior_lo, la.subspan(static_cast<std::size_t>(hi_bits_)));

        for (int i = 0; i < mn_; ++i) {
            w.acc0[static_cast<std::size_t>(i)] = NEG_INF;
            w.acc1[static_cast<std::size_t>(i)] = NEG_INF;
        }

        const std::uint8_t* tab = map_->table().data();
        const std::size_t lo_mask = (std::size_t{1} << lo_bits_) - 1;
        for (std::size_t l = 0; l < labels_; ++l) {
            double v = w.prior_hi[l >> lo_bits_] + w.prior_lo[l & lo_mask];
            const std::uint8_t* js = tab + l * static_cast<std::size_t>(n_);
            for (int t = 0; t < n_; ++t)
                v += w.chan[static_cast<std::size_t>(t) * order + js[t] - 1];
            for (int i = 0; i < mn_; ++i) {
                double& acc = ((l >> (mn_ - 1 - i)) & 1u) ? w.acc1[static_cast<std::size_t>(i)]
                                                          : w.acc0[static_cast<std::size_t>(i)];
                acc = max_log ? std::max(acc, v) : max_star(acc, v);
            }
        }
        for (int i = 0; i < mn_; ++i)
            le[static_cast<std::size_t>(i)] =
                std::clamp(w.acc0[static_cast<std::size_t>(i)] - w.acc1[static_cast<std::size_t>(i)] -
                               la[static_cast<std::size_t>(i)],
                           -LLR_CLAMP, LLR_CLAMP);
    }

    // Error-free-feedback demapping: all bits except i (1-based) are pinned to
    // the true label, so the hypothesis set is the bit-flip pair and the
    // extrinsic LLR is the channel metric difference.
    double genie_demap(std::span<const cplx> y, std::span<const cplx> h, double n0,
                       std::size_t true_label, int i) const {
        if (i < 1 || i > mn_) throw std::invalid_argument("genie_demap: bit position out of range");
        std::size_t l0 = true_label & ~(std::size_t{1} << (mn_ - i));
        std::size_t l1 = true_label | (std::size_t{1} << (mn_ - i));
        double m0 = 0, m1 = 0;
        const auto& sym = c_->symbols();
        for (int t = 0; t < n_; ++t) {
            m0 -= std::norm(y[static_cast<std::size_t>(t)] -
                            h[static_cast<std::size_t>(t)] * sym[static_cast<std::size_t>(map_->coord(l0, t) - 1)]);
            m1 -= std::norm(y[static_cast<std::size_t>(t)] -
                            h[static_cast<std::size_t>(t)] * sym[static_cast<std::size_t>(map_->coord(l1, t) - 1)]);
        }
        return std::clamp((m0 - m1) / n0, -LLR_CLAMP, LLR_CLAMP);
    }

    int bits_per_vector() const { return mn_; }
    int dims() const { return n_; }

private:
    static void fill_prior(std::vector<double>& out, std::span<const double> la) {
        // out[v] = sum over bits of +la/2 (bit 0) or -la/2 (bit 1); bit order
        // within v matches the label slice, MSB first
        out[0] = 0;
        double base = 0;
        for (double l : la) base += 0.5 * l;
        const int bits = static_cast<int>(la.size());
        for (std::size_t v = 0; v < out.size(); ++v) {
            double s = base;
            for (int k = 0; k < bits; ++k)
                if ((v >> (bits - 1 - k)) & 1u) s -= la[static_cast<std::size_t>(k)];
            out[v] = s;
        }
    }

    const MdMapping* map_;
    const Constellation* c_;
    int m_, n_, mn_, lo_bits_, hi_bits_;
    std::size_t labels_;
};

} // namespace mdqam
