#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "constellation.hpp"

namespace mdqam {

// Base MD-QPSK mapping: a 2N-bit label is mapped to N QPSK symbols so that
// every single-bit label flip moves the symbol-vector by squared distance
// >= (2N-1) * d^2_min(QPSK), the largest value a bijection can reach.
//
// The map is binary-affine over the 2N BPSK half-axes obtained by rotating
// the QPSK constellation 45 degrees: sign vector s = G*a + 1 (over GF(2)),
// then each sign pair selects one of P1..P4. Every column of G has weight
// >= 2N-1, so one label bit flips at least 2N-1 half-axes. The all-ones
// offset pins the all-zero label to [P3,...,P3].
class BaseQpskMap {
public:
    explicit BaseQpskMap(int n_dims) : n_(n_dims) {
        if (n_dims < 1 || n_dims > 3)
            throw std::invalid_argument("base QPSK map: N must be 1..3");
        const std::vector<std::uint8_t>& cols = columns(n_dims);
        const int dims = 2 * n_dims;
        const std::uint32_t ones = (1u << dims) - 1;
        table_.resize(std::size_t{1} << dims);
        std::vector<bool> hit(table_.size(), false);
        for (std::uint32_t a = 0; a < table_.size(); ++a) {
            std::uint32_t s = ones;
            for (int k = 0; k < dims; ++k)
                if ((a >> (dims - 1 - k)) & 1) s ^= cols[static_cast<std::size_t>(k)];
            std::array<std::uint8_t, 3> ks{0, 0, 0};
            std::uint32_t key = 0;
            for (int t = 0; t < n_dims; ++t) {
                int si = (s >> (dims - 1 - 2 * t)) & 1;
                int sq = (s >> (dims - 2 - 2 * t)) & 1;
                ks[static_cast<std::size_t>(t)] = pair_to_index(si, sq);
                key = key * 4 + (ks[static_cast<std::size_t>(t)] - 1);
            }
            table_[a] = ks;
            if (hit[key]) throw std::logic_error("base QPSK map: not bijective");
            hit[key] = true;
        }
    }

    int dims() const { return n_; }
    std::size_t size() const { return table_.size(); }

    // QPSK position-indexes (1..4) for a 2N-bit label
    const std::array<std::uint8_t, 3>& indexes(std::uint32_t label) const {
        return table_.at(label);
    }

    // minimum squared distance between vectors whose labels differ in one bit,
    // on the unit-circle QPSK constellation
    double hamming1_min_dist_sq() const {
        const int bits = 2 * n_;
        double best = 1e300;
        for (std::uint32_t a = 0; a < table_.size(); ++a) {
            for (int k = 0; k < bits; ++k) {
                std::uint32_t b = a ^ (1u << k);
                double d = 0;
                for (int t = 0; t < n_; ++t)
                    d += std::norm(qpsk_point(table_[a][static_cast<std::size_t>(t)]) -
                                   qpsk_point(table_[b][static_cast<std::size_t>(t)]));
                best = std::min(best, d);
            }
        }
        return best;
    }

private:
    // sign-pair to P index in the rotated frame:
    // (+,+)->P1, (-,+)->P2, (-,-)->P3, (+,-)->P4, with bit 0 meaning '+'
    static std::uint8_t pair_to_index(int si, int sq) {
        static constexpr std::uint8_t lut[2][2] = {{1, 4}, {2, 3}};
        return lut[si][sq];
    }

    // Pinned generator columns (bit d of a mask is half-axis d+1, MSB first).
    // N=2 is forced by the published 4-D 16-QAM table; N=3 follows the same
    // family (complemented unit vectors plus one all-ones column).
    static const std::vector<std::uint8_t>& columns(int n_dims) {
        static const std::vector<std::uint8_t> c1 = {0b01, 0b11};
        static const std::vector<std::uint8_t> c2 = {0b0111, 0b1011, 0b1101, 0b1111};
        static const std::vector<std::uint8_t> c3 = {0b011111, 0b101111, 0b110111,
                                                     0b111011, 0b111101, 0b111111};
        switch (n_dims) {
            case 1: return c1;
            case 2: return c2;
            default: return c3;
        }
    }

    int n_;
    std::vector<std::array<std::uint8_t, 3>> table_;
};

} // namespace mdqam
