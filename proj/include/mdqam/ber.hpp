#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "channel.hpp"
#include "constellation.hpp"
#include "demapper.hpp"
#include "fec.hpp"
#include "mapping.hpp"
#include "rng.hpp"

namespace mdqam {

struct BerConfig {
    ChannelModel channel = ChannelModel::awgn;
    std::vector<double> snr_db;
    SnrConvention convention = SnrConvention::per_2d_symbol;
    int iterations = 7;
    std::uint64_t seed = 1;
    std::uint64_t max_info_bits = 20'000'000;
    std::uint64_t target_errors = 100;  // at the final iteration; 0 = run to max bits
    std::size_t info_bits_per_frame = 5037;
    unsigned threads = 0;
    bool genie = false;   // error-free-feedback demapping, single pass
    bool max_log = false;
};

struct BerPoint {
    double snr_db = 0;
    double es_n0_db = 0;  // per 2-D symbol
    double eb_n0_db = 0;  // per info bit, effective rate
    int iteration = 1;
    double ber = 0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool undersampled = false;
};

struct SimResult {
    std::vector<BerPoint> points;
    std::uint64_t seed = 0;
    double effective_rate = 0;
};

// Full BICM-ID chain: encode -> interleave -> map -> channel -> iterative
// demapper/BCJR loop with extrinsic exchange. Frames are processed in fixed
// batches with per-frame counter RNG streams, so the result is independent of
// the worker count. Iteration 1 is plain BICM (zero a-priori at the demapper).
inline SimResult run_ber(const MdMapping& map, const Constellation& cons, const BerConfig& cfg) {
    const int mn = map.bits_per_vector();
    const int n = map.dims();
    const std::size_t K = cfg.info_bits_per_frame;
    const std::size_t coded = 2 * (K + ConvCode::kMemory);
    if (coded % static_cast<std::size_t>(mn) != 0)
        throw std::invalid_argument("run_ber: coded frame length must divide into mN-bit blocks");
    const std::size_t vectors = coded / static_cast<std::size_t>(mn);
    if (cfg.iterations < 1) throw std::invalid_argument("run_ber: iterations must be >= 1");

    const double eff_rate = static_cast<double>(K) / static_cast<double>(coded);
    const int iters = cfg.genie ? 1 : cfg.iterations;

    ConvCode code;
    Interleaver il(coded, cfg.seed ^ 0x9e3779b97f4a7c15ull);
    Demapper dem(map, cons);

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, 16);
    const std::size_t batch = 32;

    SimResult out;
    out.seed = cfg.seed;
    out.effective_rate = eff_rate;

    for (double snr : cfg.snr_db) {
        const double n0 = snr_to_n0(snr, cfg.convention, eff_rate, map.bits_per_symbol(), n);
        std::vector<std::uint64_t> errs(static_cast<std::size_t>(iters), 0);
        std::uint64_t bits = 0;

        struct FrameErrs {
            std::vector<std::uint64_t> e;
        };

        auto run_frame = [&](std::uint64_t f, FrameErrs& fe) {
            RngStream bit_rng(cfg.seed, 2 * f);
            RngStream ch_rng(cfg.seed, 2 * f + 1);
            std::vector<std::uint8_t> info(K);
            for (auto& b : info) b = static_cast<std::uint8_t>(bit_rng.next_u32() & 1);
            std::vector<std::uint8_t> cbits = code.encode(info);
            std::vector<std::uint8_t> vbits(coded);
            il.interleave<std::uint8_t>(cbits, vbits);

            std::vector<std::size_t> labels(vectors);
            std::vector<cplx> x(static_cast<std::size_t>(n));
            std::vector<cplx> y(vectors * static_cast<std::size_t>(n)), h(vectors * static_cast<std::size_t>(n));
            for (std::size_t v = 0; v < vectors; ++v) {
                std::size_t l = 0;
                for (int k = 0; k < mn; ++k) l = (l << 1) | vbits[v * static_cast<std::size_t>(mn) + static_cast<std::size_t>(k)];
                labels[v] = l;
                for (int t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = cons.symbol(map.coord(l, t));
                transmit(x, cfg.channel, n0, ch_rng,
                         std::span<cplx>(&y[v * static_cast<std::size_t>(n)], static_cast<std::size_t>(n)),
                         std::span<cplx>(&h[v * static_cast<std::size_t>(n)], static_cast<std::size_t>(n)));
            }

            std::vector<double> la_map(coded, 0.0), le_map(coded), la_dec(coded), le_dec(coded),
                app(K);
            Demapper::Workspace ws = dem.make_workspace();
            fe.e.assign(static_cast<std::size_t>(iters), 0);

            for (int it = 0; it < iters; ++it) {
                for (std::size_t v = 0; v < vectors; ++v) {
                    std::span<const cplx> yv(&y[v * static_cast<std::size_t>(n)], static_cast<std::size_t>(n));
                    std::span<const cplx> hv(&h[v * static_cast<std::size_t>(n)], static_cast<std::size_t>(n));
                    std::span<double> lev(&le_map[v * static_cast<std::size_t>(mn)], static_cast<std::size_t>(mn));
                    if (cfg.genie) {
                        for (int i = 1; i <= mn; ++i)
                            lev[static_cast<std::size_t>(i - 1)] = dem.genie_demap(yv, hv, n0, labels[v], i);
                    } else {
                        std::span<const double> lav(&la_map[v * static_cast<std::size_t>(mn)], static_cast<std::size_t>(mn));
                        dem.demap(yv, hv, n0, lav, lev, ws, cfg.max_log);
                    }
                }
                il.deinterleave<double>(le_map, la_dec);
                code.bcjr(la_dec, le_dec, app, cfg.max_log);
                il.interleave<double>(le_dec, la_map);
                std::uint64_t e = 0;
                for (std::size_t k = 0; k < K; ++k)
                    e += (app[k] < 0.0) != (info[k] != 0);
                fe.e[static_cast<std::size_t>(it)] = e;
            }
        };

        std::uint64_t frame0 = 0;
        while (true) {
            std::vector<FrameErrs> fes(batch);
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < threads; ++w) {
                pool.emplace_back([&, w]() {
                    for (std::size_t i = w; i < batch; i += threads) run_frame(frame0 + i, fes[i]);
                });
            }
            for (auto& t : pool) t.join();
            for (const auto& fe : fes)
                for (int it = 0; it < iters; ++it) errs[static_cast<std::size_t>(it)] += fe.e[static_cast<std::size_t>(it)];
            bits += batch * K;
            frame0 += batch;
            bool enough_errors = cfg.target_errors > 0 && errs[static_cast<std::size_t>(iters - 1)] >= cfg.target_errors;
            if (enough_errors || bits >= cfg.max_info_bits) break;
        }

        const double es_n0 = -10.0 * std::log10(n0 * n);  // E_sym = 1/N
        const double eb_n0 = -10.0 * std::log10(n0 * map.bits_per_symbol() * n * eff_rate);
        for (int it = 0; it < iters; ++it) {
            BerPoint p;
            p.snr_db = snr;
            p.es_n0_db = es_n0;
            p.eb_n0_db = eb_n0;
            p.iteration = it + 1;
            p.bits = bits;
            p.errors = errs[static_cast<std::size_t>(it)];
            p.ber = static_cast<double>(p.errors) / static_cast<double>(bits);
            p.undersampled = errs[static_cast<std::size_t>(iters - 1)] < 100;
            out.points.push_back(p);
        }
    }
    return out;
}

} // namespace mdqam
