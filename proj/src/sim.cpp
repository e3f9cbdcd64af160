#include "mimo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimo {

const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::dare: return "dare";
        case DetectorKind::lmmse: return "lmmse";
        case DetectorKind::mmse_sic: return "mmse_sic";
        case DetectorKind::ml: return "ml";
        case DetectorKind::maxlog: return "maxlog";
    }
    return "?";
}

std::optional<DetectorKind> detector_from_name(const std::string& name) {
    if (name == "dare") return DetectorKind::dare;
    if (name == "lmmse") return DetectorKind::lmmse;
    if (name == "mmse_sic") return DetectorKind::mmse_sic;
    if (name == "ml") return DetectorKind::ml;
    if (name == "maxlog") return DetectorKind::maxlog;
    return std::nullopt;
}

namespace {

constexpr std::uint64_t kBatch = 2048;

// Batched trial loop. Per-trial results land in slots indexed by trial and
// are folded in trial order, so aggregates do not depend on scheduling; the
// stopping rule is evaluated between batches only, making the set of trials
// a function of the config alone.
template <class Stat, class Kernel>
std::pair<Stat, bool> run_point(const SimConfig& cfg, bool use_min_errors, Kernel&& kernel) {
    Stat total;
    std::uint64_t done = 0;
    bool capped = false;
    std::vector<Stat> slots;
    while (true) {
        const bool satisfied =
            done >= cfg.min_trials && (!use_min_errors || total.stop_errors() >= cfg.min_errors);
        if (satisfied) break;
        if (done >= cfg.max_trials) {
            capped = true;
            break;
        }
        const std::uint64_t batch = std::min<std::uint64_t>(kBatch, cfg.max_trials - done);
        slots.assign(batch, Stat{});
        if (cfg.threads == 1) {
            // serial reference path
            for (std::uint64_t i = 0; i < batch; ++i) slots[i] = kernel(done + i);
        } else {
#ifdef _OPENMP
            const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch); ++i)
                slots[static_cast<std::size_t>(i)] = kernel(done + static_cast<std::uint64_t>(i));
#else
            for (std::uint64_t i = 0; i < batch; ++i) slots[i] = kernel(done + i);
#endif
        }
        for (const Stat& s : slots) total.merge(s);
        done += batch;
    }
    total.trials = done;
    return {total, capped};
}

double binomial_stderr(std::uint64_t errors, std::uint64_t n) {
    if (n == 0) return 0.0;
    const double p = static_cast<double>(errors) / static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void validate_common(const SimConfig& cfg) {
    require(cfg.m >= 1 && cfg.k >= 1, "config: m and k must be positive");
    require(cfg.m >= cfg.k, "config: m >= k required");
    require(!cfg.snr_grid_db.empty(), "config: snr grid is empty");
    require(cfg.min_trials >= 1, "config: min_trials must be >= 1");
    require(cfg.max_trials >= cfg.min_trials, "config: max_trials < min_trials");
}

void validate_flat_channel(const SimConfig& cfg, const char* tool) {
    if (cfg.channel.kind != ChannelModel::Kind::rayleigh_flat)
        throw std::invalid_argument(std::string("config: ") + tool + " runs on the flat channel model");
}

void validate_enumeration(const SimConfig& cfg, const Constellation& c) {
    if ((cfg.detector == DetectorKind::ml || cfg.detector == DetectorKind::maxlog) &&
        cfg.k * c.bits_per_symbol() > 20)
        throw std::invalid_argument("config: oracle detector requested beyond the |O|^K <= 2^20 enumeration guard");
}

std::vector<int8_t> random_bipolar_bits(Rng& rng, std::size_t n) {
    std::vector<int8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (rng.raw() >> 63) ? int8_t{-1} : int8_t{1};
    return bits;
}

inline int8_t hard_bit(double llr) { return std::signbit(llr) ? int8_t{-1} : int8_t{1}; }

DareConfig effective_dare(const SimConfig& cfg, const Constellation& c) {
    DareConfig d = cfg.dare;
    if (d.delta_d <= 0.0) d.delta_d = default_delta_d(c, d.n_c);
    if (d.region_threshold <= 0.0) d.region_threshold = c.d_qam / 8.0;
    return d;
}

// ---------------------------------------------------------------------------
// BER

struct BerStat {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t trials = 0;
    void merge(const BerStat& o) {
        bit_errors += o.bit_errors;
        bits += o.bits;
    }
    std::uint64_t stop_errors() const { return bit_errors; }
};

}  // namespace

std::vector<CurvePoint> run_ber(const SimConfig& cfg) {
    validate_common(cfg);
    validate_flat_channel(cfg, "ber");
    require(!cfg.code.has_value(), "config: ber is an uncoded experiment (remove the code block)");
    const Constellation c = build_qam(cfg.modulation);
    validate_enumeration(cfg, c);
    const DareConfig dare_cfg = effective_dare(cfg, c);
    const int bps = c.bits_per_symbol();
    const int nbits = cfg.k * bps;

    std::vector<CurvePoint> out;
    for (const double snr_db : cfg.snr_grid_db) {
        const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
        auto kernel = [&](std::uint64_t trial) -> BerStat {
            Rng ch_rng(substream_seed(cfg.seed, trial, 0));
            Rng bit_rng(substream_seed(cfg.seed, trial, 1));
            Rng noise_rng(substream_seed(cfg.seed, trial, 2));
            const CMatrix h = draw_flat(cfg.m, cfg.k, ch_rng);
            const std::vector<int8_t> bits = random_bipolar_bits(bit_rng, static_cast<std::size_t>(nbits));
            const CVector s = transmit(bits, c, cfg.k);
            const CVector y = add_awgn(mat_vec(h, s), sigma, noise_rng);

            BerStat st;
            st.bits = static_cast<std::uint64_t>(nbits);
            auto count_llr = [&](const LlrVector& llr) {
                for (int b = 0; b < nbits; ++b)
                    if (hard_bit(llr[static_cast<std::size_t>(b)]) != bits[static_cast<std::size_t>(b)])
                        ++st.bit_errors;
            };
            switch (cfg.detector) {
                case DetectorKind::dare: {
                    const QrFactors qr = regularized_qr(h, sigma, c.mean_abs);
                    count_llr(dare_detect(qr, y, c, sigma, dare_cfg).llr);
                    break;
                }
                case DetectorKind::lmmse:
                    count_llr(lmmse_detect(h, y, c, sigma).llr);
                    break;
                case DetectorKind::mmse_sic:
                    count_llr(mmse_sic_detect(h, y, c, sigma).llr);
                    break;
                case DetectorKind::maxlog:
                    count_llr(maxlog_llr_exact(h, y, c, sigma));
                    break;
                case DetectorKind::ml: {
                    const std::vector<int> idx = ml_detect(h, y, c);
                    for (int stream = 0; stream < cfg.k; ++stream)
                        for (int b = 0; b < bps; ++b)
                            if (c.label_bit(idx[static_cast<std::size_t>(stream)], b) !=
                                bits[static_cast<std::size_t>(stream * bps + b)])
                                ++st.bit_errors;
                    break;
                }
            }
            return st;
        };
        auto [st, capped] = run_point<BerStat>(cfg, true, kernel);
        CurvePoint p;
        p.snr_db = snr_db;
        p.metric = "ber";
        p.trials = st.trials;
        p.errors = st.bit_errors;
        p.value = st.bits ? static_cast<double>(st.bit_errors) / static_cast<double>(st.bits) : 0.0;
        p.std_error = binomial_stderr(st.bit_errors, st.bits);
        p.capped = capped;
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coded throughput

namespace {

struct FerStat {
    std::uint64_t block_errors = 0;
    std::uint64_t trials = 0;
    void merge(const FerStat& o) { block_errors += o.block_errors; }
    std::uint64_t stop_errors() const { return block_errors; }
};

}  // namespace

std::vector<CurvePoint> run_throughput(const SimConfig& cfg) {
    validate_common(cfg);
    require(cfg.code.has_value(), "config: throughput needs a code block (code = conv)");
    const Constellation c = build_qam(cfg.modulation);
    validate_enumeration(cfg, c);
    const DareConfig dare_cfg = effective_dare(cfg, c);
    const CodeSpec code = *cfg.code;
    const int bps = c.bits_per_symbol();
    const int kb = cfg.k * bps;
    const std::size_t coded = coded_length(code);
    const int n_uses = static_cast<int>((coded + static_cast<std::size_t>(kb) - 1) / static_cast<std::size_t>(kb));

    std::vector<CurvePoint> out;
    for (const double snr_db : cfg.snr_grid_db) {
        const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
        auto kernel = [&](std::uint64_t trial) -> FerStat {
            Rng ch_rng(substream_seed(cfg.seed, trial, 0));
            Rng bit_rng(substream_seed(cfg.seed, trial, 1));
            Rng noise_rng(substream_seed(cfg.seed, trial, 2));

            std::vector<CMatrix> hs;
            if (cfg.channel.kind == ChannelModel::Kind::rayleigh_flat) {
                hs.reserve(static_cast<std::size_t>(n_uses));
                for (int u = 0; u < n_uses; ++u) hs.push_back(draw_flat(cfg.m, cfg.k, ch_rng));
            } else {
                hs = draw_multitap(cfg.channel, ch_rng);
            }

            std::vector<std::uint8_t> info(static_cast<std::size_t>(code.block_info_bits));
            for (auto& b : info) b = static_cast<std::uint8_t>(bit_rng.raw() >> 63);
            const std::vector<std::uint8_t> cw = conv_encode(info, code);

            // Coded bit c rides use (c mod n_uses), slot (c div n_uses), so
            // adjacent coded bits land on different channel realizations.
            std::vector<double> llr_cw(coded, 0.0);
            std::vector<int8_t> use_bits(static_cast<std::size_t>(kb));
            for (int u = 0; u < n_uses; ++u) {
                for (int slot = 0; slot < kb; ++slot) {
                    const std::size_t cbit =
                        static_cast<std::size_t>(slot) * static_cast<std::size_t>(n_uses) + static_cast<std::size_t>(u);
                    const std::uint8_t bit = cbit < coded ? cw[cbit] : 0;
                    use_bits[static_cast<std::size_t>(slot)] = bit ? int8_t{-1} : int8_t{1};
                }
                const CMatrix& h = hs[static_cast<std::size_t>(u) % hs.size()];
                const CVector s = transmit(use_bits, c, cfg.k);
                const CVector y = add_awgn(mat_vec(h, s), sigma, noise_rng);

                LlrVector llr;
                switch (cfg.detector) {
                    case DetectorKind::dare: {
                        const QrFactors qr = regularized_qr(h, sigma, c.mean_abs);
                        llr = dare_detect(qr, y, c, sigma, dare_cfg).llr;
                        break;
                    }
                    case DetectorKind::lmmse:
                        llr = lmmse_detect(h, y, c, sigma).llr;
                        break;
                    case DetectorKind::mmse_sic:
                        llr = mmse_sic_detect(h, y, c, sigma).llr;
                        break;
                    case DetectorKind::maxlog:
                        llr = maxlog_llr_exact(h, y, c, sigma);
                        break;
                    case DetectorKind::ml:
                        throw std::invalid_argument("throughput: ml produces no soft output");
                }
                for (int slot = 0; slot < kb; ++slot) {
                    const std::size_t cbit =
                        static_cast<std::size_t>(slot) * static_cast<std::size_t>(n_uses) + static_cast<std::size_t>(u);
                    if (cbit < coded) llr_cw[cbit] = llr[static_cast<std::size_t>(slot)];
                }
            }

            const std::vector<std::uint8_t> dec = viterbi_decode_soft(llr_cw, code);
            FerStat st;
            st.block_errors = dec == info ? 0 : 1;
            return st;
        };
        auto [st, capped] = run_point<FerStat>(cfg, true, kernel);
        const double fer = st.trials ? static_cast<double>(st.block_errors) / static_cast<double>(st.trials) : 0.0;
        const double se = binomial_stderr(st.block_errors, st.trials);
        CurvePoint tp;
        tp.snr_db = snr_db;
        tp.metric = "throughput_frac";
        tp.value = 1.0 - fer;
        tp.trials = st.trials;
        tp.errors = st.block_errors;
        tp.std_error = se;
        tp.capped = capped;
        out.push_back(tp);
        CurvePoint fp = tp;
        fp.metric = "fer";
        fp.value = fer;
        out.push_back(std::move(fp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reliability fidelity against the exhaustive reference

namespace {

struct LlrStat {
    std::uint64_t bits = 0;
    std::uint64_t disagreements = 0;
    double abs_err_sum = 0.0;
    double abs_err_sq_sum = 0.0;
    std::uint64_t trials = 0;
    void merge(const LlrStat& o) {
        bits += o.bits;
        disagreements += o.disagreements;
        abs_err_sum += o.abs_err_sum;
        abs_err_sq_sum += o.abs_err_sq_sum;
    }
    std::uint64_t stop_errors() const { return disagreements; }
};

}  // namespace

std::vector<CurvePoint> run_llr_fidelity(const SimConfig& cfg) {
    validate_common(cfg);
    validate_flat_channel(cfg, "llr");
    require(cfg.detector == DetectorKind::dare || cfg.detector == DetectorKind::lmmse,
            "config: llr fidelity compares dare or lmmse against the exhaustive reference");
    const Constellation c = build_qam(cfg.modulation);
    if (cfg.k * c.bits_per_symbol() > 20)
        throw std::invalid_argument("config: llr fidelity needs |O|^K <= 2^20 for the exhaustive reference");
    const DareConfig dare_cfg = effective_dare(cfg, c);
    const int nbits = cfg.k * c.bits_per_symbol();
    const double clamp = dare_cfg.llr_clamp;

    std::vector<CurvePoint> out;
    for (const double snr_db : cfg.snr_grid_db) {
        const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
        auto kernel = [&](std::uint64_t trial) -> LlrStat {
            Rng ch_rng(substream_seed(cfg.seed, trial, 0));
            Rng bit_rng(substream_seed(cfg.seed, trial, 1));
            Rng noise_rng(substream_seed(cfg.seed, trial, 2));
            const CMatrix h = draw_flat(cfg.m, cfg.k, ch_rng);
            const std::vector<int8_t> bits = random_bipolar_bits(bit_rng, static_cast<std::size_t>(nbits));
            const CVector s = transmit(bits, c, cfg.k);
            const CVector y = add_awgn(mat_vec(h, s), sigma, noise_rng);

            LlrVector got;
            if (cfg.detector == DetectorKind::dare) {
                const QrFactors qr = regularized_qr(h, sigma, c.mean_abs);
                got = dare_detect(qr, y, c, sigma, dare_cfg).llr;
            } else {
                got = lmmse_detect(h, y, c, sigma).llr;
            }
            const LlrVector exact = maxlog_llr_exact(h, y, c, sigma);

            LlrStat st;
            st.bits = static_cast<std::uint64_t>(nbits);
            for (int b = 0; b < nbits; ++b) {
                const double a = got[static_cast<std::size_t>(b)];
                const double e = std::clamp(exact[static_cast<std::size_t>(b)], -clamp, clamp);
                const double ac = std::clamp(a, -clamp, clamp);
                if ((a >= 0.0) != (e >= 0.0)) ++st.disagreements;
                const double diff = std::abs(ac - e);
                st.abs_err_sum += diff;
                st.abs_err_sq_sum += diff * diff;
            }
            return st;
        };
        auto [st, capped] = run_point<LlrStat>(cfg, false, kernel);
        const double n = static_cast<double>(st.bits);
        CurvePoint sa;
        sa.snr_db = snr_db;
        sa.metric = "sign_agreement";
        sa.value = st.bits ? 1.0 - static_cast<double>(st.disagreements) / n : 1.0;
        sa.trials = st.bits;
        sa.errors = st.disagreements;
        sa.std_error = binomial_stderr(st.disagreements, st.bits);
        sa.capped = capped;
        out.push_back(sa);
        CurvePoint mae;
        mae.snr_db = snr_db;
        mae.metric = "llr_mae";
        mae.value = st.bits ? st.abs_err_sum / n : 0.0;
        mae.trials = st.bits;
        mae.errors = 0;
        const double var = st.bits ? std::max(0.0, st.abs_err_sq_sum / n - mae.value * mae.value) : 0.0;
        mae.std_error = st.bits ? std::sqrt(var / n) : 0.0;
        mae.capped = capped;
        out.push_back(std::move(mae));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Complexity instrumentation

namespace {

struct CplxStat {
    std::uint64_t sum = 0, max = 0;
    std::uint64_t sum_mf = 0, sum_layer = 0, sum_misc = 0;
    std::uint64_t trials = 0;
    void merge(const CplxStat& o) {
        sum += o.sum;
        max = std::max(max, o.max);
        sum_mf += o.sum_mf;
        sum_layer += o.sum_layer;
        sum_misc += o.sum_misc;
    }
    std::uint64_t stop_errors() const { return 0; }
};

}  // namespace

std::vector<CurvePoint> run_complexity(const SimConfig& cfg) {
    validate_common(cfg);
    validate_flat_channel(cfg, "complexity");
    const Constellation c = build_qam(cfg.modulation);
    const DareConfig dare_cfg = effective_dare(cfg, c);
    const int nbits = cfg.k * c.bits_per_symbol();
    const std::uint64_t bound = max_complexity_bound(cfg.m, cfg.k, dare_cfg.n_c);
    const std::uint64_t lmmse_mults = 4ull * static_cast<std::uint64_t>(cfg.m) * static_cast<std::uint64_t>(cfg.k);

    std::vector<CurvePoint> out;
    for (const double snr_db : cfg.snr_grid_db) {
        const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
        auto kernel = [&](std::uint64_t trial) -> CplxStat {
            Rng ch_rng(substream_seed(cfg.seed, trial, 0));
            Rng bit_rng(substream_seed(cfg.seed, trial, 1));
            Rng noise_rng(substream_seed(cfg.seed, trial, 2));
            const CMatrix h = draw_flat(cfg.m, cfg.k, ch_rng);
            const std::vector<int8_t> bits = random_bipolar_bits(bit_rng, static_cast<std::size_t>(nbits));
            const CVector y = add_awgn(mat_vec(h, transmit(bits, c, cfg.k)), sigma, noise_rng);
            const QrFactors qr = regularized_qr(h, sigma, c.mean_abs);
            const ComplexityReport rep = dare_detect(qr, y, c, sigma, dare_cfg).complexity;
            CplxStat st;
            st.sum = rep.real_mults();
            st.max = rep.real_mults();
            st.sum_mf = rep.matched_filter;
            st.sum_layer = rep.layer_metrics;
            st.sum_misc = rep.misc;
            return st;
        };
        auto [st, capped] = run_point<CplxStat>(cfg, false, kernel);
        if (st.max > bound)
            throw std::runtime_error("complexity: measured real multiplications exceed the closed-form bound");
        const double n = static_cast<double>(st.trials);
        const double mean = st.trials ? static_cast<double>(st.sum) / n : 0.0;
        auto row = [&](const char* name, double value) {
            CurvePoint p;
            p.snr_db = snr_db;
            p.metric = name;
            p.value = value;
            p.trials = st.trials;
            p.errors = 0;
            p.std_error = 0.0;
            p.capped = capped;
            out.push_back(std::move(p));
        };
        row("mean_real_mults", mean);
        row("max_real_mults", static_cast<double>(st.max));
        row("complexity_bound", static_cast<double>(bound));
        row("lmmse_real_mults", static_cast<double>(lmmse_mults));
        row("ratio_mean", mean / static_cast<double>(lmmse_mults));
        row("ratio_max", static_cast<double>(st.max) / static_cast<double>(lmmse_mults));
        row("mean_matched_filter", st.trials ? static_cast<double>(st.sum_mf) / n : 0.0);
        row("mean_layer_metrics", st.trials ? static_cast<double>(st.sum_layer) / n : 0.0);
        row("mean_misc", st.trials ? static_cast<double>(st.sum_misc) / n : 0.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exclusion probability

namespace {

struct ExclStat {
    std::uint64_t excluded = 0;
    double bound_sum = 0.0;
    double bound_sq_sum = 0.0;
    std::uint64_t trials = 0;
    void merge(const ExclStat& o) {
        excluded += o.excluded;
        bound_sum += o.bound_sum;
        bound_sq_sum += o.bound_sq_sum;
    }
    std::uint64_t stop_errors() const { return excluded; }
};

}  // namespace

std::vector<CurvePoint> run_bound(const SimConfig& cfg) {
    validate_common(cfg);
    const Constellation c = build_qam(cfg.modulation);
    const DareConfig dare_cfg = effective_dare(cfg, c);

    std::vector<CurvePoint> out;

    if (!cfg.r_diag.empty()) {
        // Fixed-diagonal mode: evaluate the closed form directly.
        if (cfg.r_diag.size() != static_cast<std::size_t>(cfg.k))
            throw std::invalid_argument("config: r_diag needs exactly k entries");
        CMatrix r(static_cast<std::size_t>(cfg.k), static_cast<std::size_t>(cfg.k));
        for (int i = 0; i < cfg.k; ++i)
            r(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = cfg.r_diag[static_cast<std::size_t>(i)];
        for (const double snr_db : cfg.snr_grid_db) {
            const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
            CurvePoint p;
            p.snr_db = snr_db;
            p.metric = "exclusion_bound";
            p.value = exclusion_probability_bound(r, sigma, dare_cfg.delta_d);
            out.push_back(std::move(p));
        }
        return out;
    }

    validate_flat_channel(cfg, "bound");
    const int nbits = cfg.k * c.bits_per_symbol();
    for (const double snr_db : cfg.snr_grid_db) {
        const double sigma = std::sqrt(sigma2_from_snr_db(snr_db, cfg.k));
        auto kernel = [&](std::uint64_t trial) -> ExclStat {
            Rng ch_rng(substream_seed(cfg.seed, trial, 0));
            Rng bit_rng(substream_seed(cfg.seed, trial, 1));
            Rng noise_rng(substream_seed(cfg.seed, trial, 2));
            const CMatrix h = draw_flat(cfg.m, cfg.k, ch_rng);
            const std::vector<int8_t> bits = random_bipolar_bits(bit_rng, static_cast<std::size_t>(nbits));
            const std::vector<int> truth = transmit_indices(bits, c, cfg.k);
            CVector s(static_cast<std::size_t>(cfg.k));
            for (int i = 0; i < cfg.k; ++i) s[static_cast<std::size_t>(i)] = c.point(truth[static_cast<std::size_t>(i)]);
            const CVector y = add_awgn(mat_vec(h, s), sigma, noise_rng);
            const QrFactors qr = regularized_qr(h, sigma, c.mean_abs);
            const DareResult res = dare_detect(qr, y, c, sigma, dare_cfg);
            ExclStat st;
            st.excluded = res.candidates.contains(truth) ? 0 : 1;
            const double b = exclusion_probability_bound(qr.r, sigma, dare_cfg.delta_d);
            st.bound_sum = b;
            st.bound_sq_sum = b * b;
            return st;
        };
        auto [st, capped] = run_point<ExclStat>(cfg, false, kernel);
        const double n = static_cast<double>(st.trials);
        CurvePoint er;
        er.snr_db = snr_db;
        er.metric = "exclusion_rate";
        er.value = st.trials ? static_cast<double>(st.excluded) / n : 0.0;
        er.trials = st.trials;
        er.errors = st.excluded;
        er.std_error = binomial_stderr(st.excluded, st.trials);
        er.capped = capped;
        out.push_back(er);
        CurvePoint bm;
        bm.snr_db = snr_db;
        bm.metric = "bound_mean";
        bm.value = st.trials ? st.bound_sum / n : 0.0;
        bm.trials = st.trials;
        bm.errors = 0;
        const double var = st.trials ? std::max(0.0, st.bound_sq_sum / n - bm.value * bm.value) : 0.0;
        bm.std_error = st.trials ? std::sqrt(var / n) : 0.0;
        bm.capped = capped;
        out.push_back(std::move(bm));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::string to_csv(const SimConfig& cfg, const std::string& tool, const std::vector<CurvePoint>& pts) {
    const Constellation c = build_qam(cfg.modulation);
    const DareConfig d = effective_dare(cfg, c);
    std::string s;
    s += "# tool = mimo_sim " + tool + "\n";
    s += "# m = " + std::to_string(cfg.m) + "\n";
    s += "# k = " + std::to_string(cfg.k) + "\n";
    s += "# modulation = " + std::to_string(cfg.modulation) + "\n";
    s += "# detector = " + std::string(detector_name(cfg.detector)) + "\n";
    s += "# nc = " + std::to_string(d.n_c) + "\n";
    s += "# delta_d = " + fmt("%.12g", d.delta_d) + (cfg.dare.delta_d <= 0.0 ? " (default rule)" : "") + "\n";
    s += "# llr_clamp = " + fmt("%.12g", d.llr_clamp) + "\n";
    s += "# region_threshold = " + fmt("%.12g", d.region_threshold) +
         (cfg.dare.region_threshold <= 0.0 ? " (default d_qam/8)" : "") + "\n";
    s += "# channel = ";
    s += cfg.channel.kind == ChannelModel::Kind::rayleigh_flat ? "rayleigh_flat" : "rayleigh_multitap";
    s += ", taps = " + std::to_string(cfg.channel.taps) +
         ", subcarriers = " + std::to_string(cfg.channel.subcarriers) + "\n";
    s += "# snr_db =";
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
        s += (i ? "," : " ") + fmt("%.6g", cfg.snr_grid_db[i]);
    s += "\n";
    s += "# min_trials = " + std::to_string(cfg.min_trials) + ", min_errors = " + std::to_string(cfg.min_errors) +
         ", max_trials = " + std::to_string(cfg.max_trials) + "\n";
    s += "# seed = " + std::to_string(cfg.seed) + "\n";
    if (cfg.code) {
        s += "# code = conv_k7_g133_171, rate = ";
        s += cfg.code->rate == CodeSpec::Rate::half ? "1/2" : "3/4";
        s += ", block_info_bits = " + std::to_string(cfg.code->block_info_bits);
        s += " (soft-decision Viterbi; stands in for a standards LDPC chain)\n";
    } else {
        s += "# code = none\n";
    }
    if (!cfg.r_diag.empty()) {
        s += "# r_diag =";
        for (std::size_t i = 0; i < cfg.r_diag.size(); ++i) s += (i ? "," : " ") + fmt("%.12g", cfg.r_diag[i]);
        s += "\n";
    }
    s += "# snr_convention = per-receive-antenna: sigma^2 = K / 10^(snr_db/10), unit symbol energy\n";
    s += "snr_db,metric,value,trials,errors,stderr,capped\n";
    for (const CurvePoint& p : pts) {
        s += fmt("%.6g", p.snr_db) + "," + p.metric + "," + fmt("%.12g", p.value) + "," +
             std::to_string(p.trials) + "," + std::to_string(p.errors) + "," + fmt("%.6g", p.std_error) + "," +
             (p.capped ? "1" : "0") + "\n";
    }
    return s;
}

}  // namespace mimo
