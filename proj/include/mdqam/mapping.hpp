#pragma once
#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "base_qpsk.hpp"
#include "constellation.hpp"
#include "rng.hpp"
#include "step_tables.hpp"

namespace mdqam {

// Bijective table between mN-bit labels and N-tuples of 2-D position-indexes.
// Bit 1 of a label is its most significant bit, so the decimal label value is
// sum l^(k) 2^(mN-k).
class MdMapping {
public:
    MdMapping(int m, int n_dims, std::vector<std::uint8_t> idx, std::string provenance,
              std::uint64_t seed = 0)
        : m_(m), n_(n_dims), order_(1 << m), idx_(std::move(idx)),
          provenance_(std::move(provenance)), seed_(seed) {
        if (n_dims < 1 || n_dims > 3) throw std::invalid_argument("mapping: N must be 1..3");
        labels_ = std::size_t{1} << (m_ * n_);
        if (idx_.size() != labels_ * static_cast<std::size_t>(n_))
            throw std::invalid_argument("mapping: table size mismatch");
        build_inverse();
    }

    int bits_per_symbol() const { return m_; }
    int dims() const { return n_; }
    int bits_per_vector() const { return m_ * n_; }
    std::size_t labels() const { return labels_; }
    const std::string& provenance() const { return provenance_; }
    std::uint64_t seed() const { return seed_; }

    // position-index (1-based) of coordinate t under label l
    int coord(std::size_t label, int t) const {
        return idx_[label * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t)];
    }

    const std::vector<std::uint8_t>& table() const { return idx_; }

    // mixed-radix key of a vector of position-indexes; coordinate 0 is the
    // most significant digit
    std::size_t key_of(std::size_t label) const {
        std::size_t key = 0;
        for (int t = 0; t < n_; ++t)
            key = key * static_cast<std::size_t>(order_) + static_cast<std::size_t>(coord(label, t) - 1);
        return key;
    }

    // label carried by the vector with the given mixed-radix key, or npos
    static constexpr std::uint32_t npos = 0xffffffffu;
    std::uint32_t label_of_key(std::size_t key) const { return inverse_[key]; }

    bool bit(std::size_t label, int i) const {  // i = 1..mN, bit 1 = MSB
        return (label >> (m_ * n_ - i)) & 1u;
    }

private:
    void build_inverse() {
        std::size_t keys = 1;
        for (int t = 0; t < n_; ++t) keys *= static_cast<std::size_t>(order_);
        inverse_.assign(keys, npos);
        for (std::size_t l = 0; l < labels_; ++l) {
            for (int t = 0; t < n_; ++t) {
                int j = coord(l, t);
                if (j < 1 || j > order_)
                    throw std::invalid_argument("mapping: position-index out of range");
            }
            std::size_t key = key_of(l);
            if (inverse_[key] != npos)
                throw std::invalid_argument("mapping: duplicate symbol-vector, not bijective");
            inverse_[key] = static_cast<std::uint32_t>(l);
        }
    }

    int m_, n_, order_;
    std::size_t labels_;
    std::vector<std::uint8_t> idx_;
    std::vector<std::uint32_t> inverse_;
    std::string provenance_;
    std::uint64_t seed_;
};

// --- construction steps ----------------------------------------------------

// step 1: map the 2N least significant label bits through the base MD-QPSK
// map, then convert QPSK indexes to constellation position-indexes via gamma
inline void map_step1(std::uint32_t a1, const BaseQpskMap& base, const std::vector<int>& gamma,
                      std::array<int, 3>& j) {
    const auto& ks = base.indexes(a1);
    for (int t = 0; t < base.dims(); ++t)
        j[static_cast<std::size_t>(t)] = gamma[static_cast<std::size_t>(ks[static_cast<std::size_t>(t)] - 1)];
}

// beta selection by (parity of w_H(b_i), bit value b_i^(k))
inline const std::vector<int>& select_beta(const StepTables::Betas& b, unsigned b_bits, int n_dims,
                                           int k) {
    bool odd = std::popcount(b_bits) & 1u;
    bool set = (b_bits >> (n_dims - 1 - k)) & 1u;
    if (odd) return set ? b.o1 : b.o0;
    return set ? b.e1 : b.e0;
}

// one transformation step: j_{i-1} -> j_i through the selected beta vectors
inline void transform_step(std::array<int, 3>& j, unsigned b_bits, int n_dims,
                           const std::vector<int>& alpha_prev, const StepTables::Betas& betas) {
    for (int t = 0; t < n_dims; ++t) {
        auto it = std::find(alpha_prev.begin(), alpha_prev.end(), j[static_cast<std::size_t>(t)]);
        if (it == alpha_prev.end())
            throw std::logic_error("transform_step: position-index not in alpha");
        std::size_t q = static_cast<std::size_t>(it - alpha_prev.begin());
        j[static_cast<std::size_t>(t)] = select_beta(betas, b_bits, n_dims, t)[q];
    }
}

// The systematic (m-1)-step construction. Deterministic; the provenance
// string records the construction route.
inline MdMapping build_mapping(int m, int n_dims) {
    if (m != 4 && m != 6) throw std::invalid_argument("build_mapping: m must be 4 or 6");
    if (n_dims != 2 && n_dims != 3) throw std::invalid_argument("build_mapping: N must be 2 or 3");
    StepTables tabs = step_tables(m);
    BaseQpskMap base(n_dims);

    const std::size_t labels = std::size_t{1} << (m * n_dims);
    std::vector<std::uint8_t> idx(labels * static_cast<std::size_t>(n_dims));

    // per-step lookup: position-index -> rank q in alpha_{i-1}
    std::vector<std::vector<int>> rank(tabs.alpha.size());
    for (std::size_t s = 0; s < tabs.alpha.size(); ++s) {
        rank[s].assign(static_cast<std::size_t>(1 << m) + 1, -1);
        for (std::size_t q = 0; q < tabs.alpha[s].size(); ++q)
            rank[s][static_cast<std::size_t>(tabs.alpha[s][q])] = static_cast<int>(q);
    }

    std::array<int, 3> j{};
    for (std::size_t l = 0; l < labels; ++l) {
        std::uint32_t a1 = static_cast<std::uint32_t>(l) & ((1u << (2 * n_dims)) - 1);
        map_step1(a1, base, tabs.gamma, j);
        for (int i = 2; i <= m - 1; ++i) {
            unsigned b = (static_cast<unsigned>(l) >> (i * n_dims)) & ((1u << n_dims) - 1);
            const auto& betas = tabs.beta_at(i);
            const auto& rk = rank[static_cast<std::size_t>(i - 2)];
            for (int t = 0; t < n_dims; ++t) {
                int q = rk[static_cast<std::size_t>(j[static_cast<std::size_t>(t)])];
                if (q < 0) throw std::logic_error("build_mapping: index escaped alpha");
                j[static_cast<std::size_t>(t)] =
                    select_beta(betas, b, n_dims, t)[static_cast<std::size_t>(q)];
            }
        }
        for (int t = 0; t < n_dims; ++t)
            idx[l * static_cast<std::size_t>(n_dims) + static_cast<std::size_t>(t)] =
                static_cast<std::uint8_t>(j[static_cast<std::size_t>(t)]);
    }
    return MdMapping(m, n_dims, std::move(idx),
                     "systematic m=" + std::to_string(m) + " N=" + std::to_string(n_dims));
}

// uniformly random bijection between labels and the full product set
inline MdMapping random_mapping(int m, int n_dims, std::uint64_t seed) {
    const std::size_t labels = std::size_t{1} << (m * n_dims);
    const int order = 1 << m;
    std::vector<std::uint32_t> perm(labels);
    std::iota(perm.begin(), perm.end(), 0u);
    RngStream rng(seed, 0x3a9);
    for (std::size_t i = labels; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(static_cast<std::uint32_t>(i))]);
    std::vector<std::uint8_t> idx(labels * static_cast<std::size_t>(n_dims));
    for (std::size_t l = 0; l < labels; ++l) {
        std::size_t key = perm[l];
        for (int t = n_dims - 1; t >= 0; --t) {
            idx[l * static_cast<std::size_t>(n_dims) + static_cast<std::size_t>(t)] =
                static_cast<std::uint8_t>(key % static_cast<std::size_t>(order) + 1);
            key /= static_cast<std::size_t>(order);
        }
    }
    return MdMapping(m, n_dims, std::move(idx), "random", seed);
}

// N-fold product of the per-symbol reflected-binary Gray labeling
inline MdMapping gray_mapping(int m, int n_dims) {
    const int order = 1 << m;
    std::vector<int> sym_label(static_cast<std::size_t>(order));  // position-index-1 -> label
    if (m == 2) {
        // Gray around the QPSK circle: P1..P4 -> 00,01,11,10
        sym_label = {0, 1, 3, 2};
    } else {
        int side = 1 << (m / 2);
        auto gray = [](int x) { return x ^ (x >> 1); };
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c)
                sym_label[static_cast<std::size_t>(r * side + c)] = (gray(r) << (m / 2)) | gray(c);
    }
    std::vector<int> label_sym(static_cast<std::size_t>(order));
    for (int j = 0; j < order; ++j) label_sym[static_cast<std::size_t>(sym_label[static_cast<std::size_t>(j)])] = j;

    const std::size_t labels = std::size_t{1} << (m * n_dims);
    std::vector<std::uint8_t> idx(labels * static_cast<std::size_t>(n_dims));
    for (std::size_t l = 0; l < labels; ++l)
        for (int t = 0; t < n_dims; ++t) {
            int sub = static_cast<int>(l >> (m * (n_dims - 1 - t))) & (order - 1);
            idx[l * static_cast<std::size_t>(n_dims) + static_cast<std::size_t>(t)] =
                static_cast<std::uint8_t>(label_sym[static_cast<std::size_t>(sub)] + 1);
        }
    return MdMapping(m, n_dims, std::move(idx), "gray");
}

} // namespace mdqam
