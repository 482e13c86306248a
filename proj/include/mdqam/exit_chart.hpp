#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "constellation.hpp"
#include "demapper.hpp"
#include "fec.hpp"
#include "mapping.hpp"
#include "rng.hpp"

namespace mdqam {

struct ExitCurve {
    std::vector<double> ia;  // a-priori mutual information grid
    std::vector<double> ie;  // measured extrinsic mutual information
};

namespace exitdetail {

// numerically stable log2(1 + e^{-x})
inline double log2_1p_exp_neg(double x) {
    return (std::max(0.0, -x) + std::log1p(std::exp(-std::abs(x)))) / std::numbers::ln2;
}

// mutual information of the Gaussian-consistent LLR model
// L = (1-2b) sigma^2/2 + sigma z, via quadrature over z
inline double j_function(double sigma) {
    if (sigma <= 0) return 0.0;
    const int n = 400;
    const double z0 = -9.0, z1 = 9.0;
    const double hstep = (z1 - z0) / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        double z = z0 + k * hstep;
        double l = sigma * sigma / 2.0 + sigma * z;
        double f = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) * log2_1p_exp_neg(l);
        double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return std::clamp(1.0 - acc * hstep / 3.0, 0.0, 1.0);
}

inline double j_inverse(double i_target) {
    if (i_target <= 0) return 0.0;
    double lo = 1e-4, hi = 50.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (j_function(mid) < i_target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// time-average consistency estimator of I(L; b)
struct MiEstimator {
    double acc = 0;
    std::uint64_t n = 0;
    void add(double llr, int bit) {
        acc += log2_1p_exp_neg(bit ? -llr : llr);
        ++n;
    }
    double value() const { return std::clamp(1.0 - acc / static_cast<double>(n), 0.0, 1.0); }
};

} // namespace exitdetail

inline constexpr std::size_t kExitSampleFloor = 20000;

// Demapper transfer curve at a fixed channel state: a-priori LLRs are drawn
// Gaussian-consistent with sigma = J^-1(I_A); I_E is measured with the
// consistency estimator over `samples` extrinsic LLRs per grid point.
inline ExitCurve exit_demapper(const MdMapping& map, const Constellation& cons, ChannelModel model,
                               double n0, const std::vector<double>& ia_grid, std::size_t samples,
                               std::uint64_t seed) {
    if (samples < kExitSampleFloor)
        throw std::invalid_argument("exit_demapper: sample budget below the configured floor");
    const int mn = map.bits_per_vector();
    const int n = map.dims();
    Demapper dem(map, cons);
    Demapper::Workspace ws = dem.make_workspace();
    ExitCurve curve;

    std::vector<cplx> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
    std::vector<double> la(static_cast<std::size_t>(mn)), le(static_cast<std::size_t>(mn));

    const std::size_t vectors = (samples + static_cast<std::size_t>(mn) - 1) / static_cast<std::size_t>(mn);
    for (std::size_t pt = 0; pt < ia_grid.size(); ++pt) {
        double ia = ia_grid[pt];
        if (ia < 0 || ia >= 1) throw std::invalid_argument("exit_demapper: I_A must be in [0,1)");
        double sigma = exitdetail::j_inverse(ia);
        exitdetail::MiEstimator est;
        RngStream rng(seed, 0x8000000000000000ull | (pt << 40));
        for (std::size_t v = 0; v < vectors; ++v) {
            std::size_t label = 0;
            for (int t = 0; t < (mn + 31) / 32; ++t)
                label = (label << 32) | rng.next_u32();
            label &= map.labels() - 1;
            for (int t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = cons.symbol(map.coord(label, t));
            transmit(x, model, n0, rng, y, h);
            for (int i = 0; i < mn; ++i) {
                int bit = static_cast<int>((label >> (mn - 1 - i)) & 1);
                la[static_cast<std::size_t>(i)] =
                    (ia == 0.0) ? 0.0 : (1 - 2 * bit) * sigma * sigma / 2.0 + sigma * rng.normal();
            }
            dem.demap(y, h, n0, la, le, ws);
            for (int i = 0; i < mn; ++i)
                est.add(le[static_cast<std::size_t>(i)], static_cast<int>((label >> (mn - 1 - i)) & 1));
        }
        curve.ia.push_back(ia);
        curve.ie.push_back(est.value());
    }
    return curve;
}

// Decoder transfer curve: BCJR fed only by Gaussian-consistent priors on the
// coded bits; SNR-independent.
inline ExitCurve exit_decoder(const ConvCode& code, const std::vector<double>& ia_grid,
                              std::size_t samples, std::size_t info_bits_per_frame,
                              std::uint64_t seed) {
    if (samples < kExitSampleFloor)
        throw std::invalid_argument("exit_decoder: sample budget below the configured floor");
    const std::size_t coded_per_frame = 2 * (info_bits_per_frame + ConvCode::kMemory);
    const std::size_t frames = (samples + coded_per_frame - 1) / coded_per_frame;
    ExitCurve curve;

    std::vector<std::uint8_t> info(info_bits_per_frame);
    std::vector<double> la(coded_per_frame), le(coded_per_frame), app(info_bits_per_frame);

    for (std::size_t pt = 0; pt < ia_grid.size(); ++pt) {
        double ia = ia_grid[pt];
        if (ia < 0 || ia >= 1) throw std::invalid_argument("exit_decoder: I_A must be in [0,1)");
        double sigma = exitdetail::j_inverse(ia);
        exitdetail::MiEstimator est;
        RngStream rng(seed, 0x4000000000000000ull | (pt << 40));
        for (std::size_t f = 0; f < frames; ++f) {
            for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_u32() & 1);
            std::vector<std::uint8_t> coded = code.encode(info);
            for (std::size_t i = 0; i < coded_per_frame; ++i)
                la[i] = (ia == 0.0) ? 0.0
                                    : (1 - 2 * static_cast<int>(coded[i])) * sigma * sigma / 2.0 +
                                          sigma * rng.normal();
            code.bcjr(la, le, app);
            for (std::size_t i = 0; i < coded_per_frame; ++i) est.add(le[i], coded[i]);
        }
        curve.ia.push_back(ia);
        curve.ie.push_back(est.value());
    }
    return curve;
}

// Minimum vertical opening between the demapper curve and the inverse of the
// decoder curve; positive everywhere means an open tunnel.
inline double tunnel_gap(const ExitCurve& demapper, const ExitCurve& decoder) {
    // decoder inverse: smallest input I_A the decoder needs to emit I_E = a
    auto dec_inverse = [&](double a) {
        const auto& ia = decoder.ia;
        const auto& ie = decoder.ie;
        if (a <= ie.front()) return 0.0;
        for (std::size_t k = 1; k < ie.size(); ++k) {
            double lo = ie[k - 1], hi = ie[k];
            if (a <= hi) {
                if (hi <= lo) return ia[k];
                double w = (a - lo) / (hi - lo);
                return ia[k - 1] + w * (ia[k] - ia[k - 1]);
            }
        }
        // extrapolate toward the (1,1) endpoint
        double lo = ie.back(), hi = 1.0;
        if (a >= hi || hi <= lo) return 1.0;
        return ia.back() + (a - lo) / (hi - lo) * (1.0 - ia.back());
    };
    double gap = 1e300;
    for (std::size_t k = 0; k < demapper.ia.size(); ++k)
        gap = std::min(gap, demapper.ie[k] - dec_inverse(demapper.ia[k]));
    return gap;
}

inline std::vector<double> default_ia_grid() {
    std::vector<double> g;
    for (double v : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.999}) g.push_back(v);
    return g;
}

} // namespace mdqam
