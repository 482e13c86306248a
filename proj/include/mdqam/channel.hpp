#pragma once
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include "constellation.hpp"
#include "rng.hpp"

namespace mdqam {

enum class ChannelModel { awgn, block, fast };

inline ChannelModel channel_from_string(const std::string& s) {
    if (s == "awgn") return ChannelModel::awgn;
    if (s == "block") return ChannelModel::block;
    if (s == "fast") return ChannelModel::fast;
    throw std::invalid_argument("unknown channel model: " + s);
}

inline const char* to_string(ChannelModel m) {
    switch (m) {
        case ChannelModel::awgn: return "awgn";
        case ChannelModel::block: return "block";
        default: return "fast";
    }
}

enum class SnrConvention { per_vector, per_2d_symbol, per_info_bit };

inline SnrConvention snr_convention_from_string(const std::string& s) {
    if (s == "per-vector") return SnrConvention::per_vector;
    if (s == "per-2d-symbol") return SnrConvention::per_2d_symbol;
    if (s == "per-info-bit") return SnrConvention::per_info_bit;
    throw std::invalid_argument("unknown SNR convention: " + s);
}

// Mean symbol-vector energy is one by construction, so E_vec = 1,
// E_sym = 1/N and E_b = 1/(m*N*R) with R the effective code rate.
inline double snr_to_n0(double snr_db, SnrConvention conv, double code_rate, int m, int n_dims) {
    double lin = std::pow(10.0, -snr_db / 10.0);
    switch (conv) {
        case SnrConvention::per_vector: return lin;
        case SnrConvention::per_2d_symbol: return lin / n_dims;
        case SnrConvention::per_info_bit:
            if (code_rate <= 0) throw std::invalid_argument("snr_to_n0: nonpositive code rate");
            return lin / (m * n_dims * code_rate);
    }
    throw std::invalid_argument("snr_to_n0: bad convention");
}

// y_k = h_k * x_k + n_k per coordinate; n_k complex Gaussian with variance N0.
// Fading draws are CN(0,1) (unit mean-square magnitude); block fading reuses
// one coefficient across the vector. h is returned for perfect-CSI demapping.
inline void transmit(std::span<const cplx> x, ChannelModel model, double n0, RngStream& rng,
                     std::span<cplx> y, std::span<cplx> h) {
    if (n0 <= 0) throw std::invalid_argument("transmit: N0 must be positive");
    if (y.size() != x.size() || h.size() != x.size())
        throw std::invalid_argument("transmit: span size mismatch");
    const double hs = std::sqrt(0.5);
    cplx hb(1.0, 0.0);
    if (model == ChannelModel::block) hb = cplx(hs * rng.normal(), hs * rng.normal());
    const double ns = std::sqrt(n0 / 2.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        switch (model) {
            case ChannelModel::awgn: h[k] = cplx(1.0, 0.0); break;
            case ChannelModel::block: h[k] = hb; break;
            case ChannelModel::fast: h[k] = cplx(hs * rng.normal(), hs * rng.normal()); break;
        }
        y[k] = h[k] * x[k] + cplx(ns * rng.normal(), ns * rng.normal());
    }
}

} // namespace mdqam
