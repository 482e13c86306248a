#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "fec.hpp"
#include "metrics.hpp"

namespace mdqam {

// Error-free-feedback union bounds on the BICM-ID bit error rate:
//   P_b <= sum_d c_d PEP(d)
// with c_d the information-weight spectrum of the convolutional code and the
// per-d pairwise error probability depending on the channel:
//   AWGN   Q( sqrt(d * dhat2_min / (2 N0)) )
//   block  C(2d-1, d) (4 N0 / phi_hat_br)^d
//   fast   C(2d-1, d) phi_fr_after(N0)^{-d}
struct FloorBound {
    ChannelModel channel = ChannelModel::awgn;
    std::vector<double> snr_db;
    std::vector<double> bound;
    int d_free = 0;
};

namespace floordetail {

inline double q_func(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double binom_2dm1_d(int d) {
    // C(2d-1, d) computed multiplicatively
    double v = 1.0;
    for (int k = 1; k <= d - 1; ++k) v *= static_cast<double>(d + k) / static_cast<double>(k);
    return v;
}

} // namespace floordetail

inline FloorBound floor_bound(const MdMapping& map, const Constellation& cons, ChannelModel channel,
                              const ConvCode::Spectrum& spec, const std::vector<double>& snr_db,
                              SnrConvention conv, double code_rate) {
    if (spec.info_weight.empty()) throw std::invalid_argument("floor_bound: empty code spectrum");
    FloorBound out;
    out.channel = channel;
    out.snr_db = snr_db;
    out.d_free = spec.d_free;

    PairSpectrum after = pair_spectrum_after(map, cons);
    const double dhat2 = min_pair_dist_sq(after);
    const double phi_hat = harmonic_mean(after);

    for (double snr : snr_db) {
        double n0 = snr_to_n0(snr, conv, code_rate, map.bits_per_symbol(), map.dims());
        double acc = 0.0;
        for (const auto& [d, cd] : spec.info_weight) {
            double pep = 0.0;
            switch (channel) {
                case ChannelModel::awgn:
                    pep = floordetail::q_func(std::sqrt(d * dhat2 / (2.0 * n0)));
                    break;
                case ChannelModel::block:
                    pep = floordetail::binom_2dm1_d(d) * std::pow(4.0 * n0 / phi_hat, d);
                    break;
                case ChannelModel::fast:
                    pep = floordetail::binom_2dm1_d(d) * std::pow(phi_fast(after, n0), -d);
                    break;
            }
            acc += cd * pep;
        }
        out.bound.push_back(acc);
    }
    return out;
}

} // namespace mdqam
