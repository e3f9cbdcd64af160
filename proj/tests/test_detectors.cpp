#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mimo/channel.hpp"
#include "mimo/detectors.hpp"

using namespace mimo;

namespace {

struct Instance {
    CMatrix h;
    std::vector<int8_t> bits;
    std::vector<int> truth;
    CVector y;
    double sigma;
};

Instance random_instance(int m, int k, const Constellation& c, double snr_db, std::uint64_t seed,
                         std::uint64_t trial) {
    Instance inst;
    Rng ch(substream_seed(seed, trial, 0)), bit(substream_seed(seed, trial, 1)), noise(substream_seed(seed, trial, 2));
    inst.h = draw_flat(m, k, ch);
    inst.bits.resize(static_cast<std::size_t>(k) * c.bits_per_symbol());
    for (auto& b : inst.bits) b = (bit.raw() >> 63) ? int8_t{-1} : int8_t{1};
    inst.truth = transmit_indices(inst.bits, c, k);
    CVector s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = c.point(inst.truth[static_cast<std::size_t>(i)]);
    inst.sigma = std::sqrt(sigma2_from_snr_db(snr_db, k));
    inst.y = add_awgn(mat_vec(inst.h, s), inst.sigma, noise);
    return inst;
}

int best_candidate(const CandidateList& cl) {
    int best = 0;
    for (int n = 1; n < cl.active; ++n)
        if (cl.metrics[static_cast<std::size_t>(n)] < cl.metrics[static_cast<std::size_t>(best)]) best = n;
    return best;
}

}  // namespace

TEST_SUITE("detectors") {

TEST_CASE("closed-form complexity bound") {
    CHECK(max_complexity_bound(64, 12, 4) == 4992);  // 3072 + 1344 + 576
    CHECK(max_complexity_bound(12, 12, 8) == 4416);  // 576 + 2688 + 1152
    CHECK_THROWS(max_complexity_bound(64, 12, 0));
}

TEST_CASE("default pruning slack") {
    const Constellation qam16 = build_qam(16);
    const Constellation qpsk = build_qam(4);
    CHECK(default_delta_d(qam16, 4) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(default_delta_d(qpsk, 4) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(default_delta_d(qam16, 3) == doctest::Approx(0.5 * qam16.d_qam * qam16.d_qam).epsilon(1e-12));
}

TEST_CASE("exclusion probability bound") {
    CMatrix r1 = CMatrix::identity(1);
    CHECK(exclusion_probability_bound(r1, 1.0, std::log(10.0)) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(exclusion_probability_bound(r1, 1.0, 1e9) < 1e-12);

    Rng rng(6);
    const Constellation c = build_qam(16);
    const CMatrix h = testref::random_matrix(12, 12, rng);
    const double sigma = std::sqrt(sigma2_from_snr_db(20.0, 12));
    const auto qr = regularized_qr(h, sigma, c.mean_abs);
    const double b = exclusion_probability_bound(qr.r, sigma, default_delta_d(c, 8));
    CHECK(b >= 0.0);
    CHECK(b < 0.1);

    CMatrix zero(2, 2);
    zero(0, 0) = 1.0;  // second diagonal entry stays zero
    CHECK_THROWS(exclusion_probability_bound(zero, 1.0, 1.0));
}

TEST_CASE("exact reliabilities on one stream reduce to the two-term algebra") {
    const Constellation c = build_qam(4);
    CMatrix h(1, 1);
    h(0, 0) = 1.0;
    const double a = 1.0 / std::sqrt(2.0);
    CVector y(1, cx{0.5 * a, 0.5 * a});
    const LlrVector llr = maxlog_llr_exact(h, y, c, 1.0);
    REQUIRE(llr.size() == 2);
    CHECK(llr[0] == doctest::Approx(4.0 * 0.5 * a * a).epsilon(1e-12));  // 4 * Re(y) * level
    CHECK(llr[1] == doctest::Approx(4.0 * 0.5 * a * a).epsilon(1e-12));

    y[0] = cx{0.0, 0.0};  // equidistant hypotheses
    const LlrVector zero = maxlog_llr_exact(h, y, c, 1.0);
    CHECK(zero[0] == doctest::Approx(0.0));
    CHECK(zero[1] == doctest::Approx(0.0));
}

TEST_CASE("exact reliabilities match an independently coded enumerator") {
    const Constellation c = build_qam(4);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const Instance inst = random_instance(2, 2, c, 8.0, 51, t);
        const LlrVector a = maxlog_llr_exact(inst.h, inst.y, c, inst.sigma);
        const LlrVector b = testref::maxlog_odometer(inst.h, inst.y, c, inst.sigma);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
}

TEST_CASE("hard ml recovers a noiseless transmission and documents its tie-break") {
    const Constellation c16 = build_qam(16);
    Rng rng(17);
    const CMatrix h = testref::random_matrix(3, 3, rng);
    std::vector<int8_t> bits(static_cast<std::size_t>(3) * 4);
    for (auto& b : bits) b = (rng.raw() >> 63) ? int8_t{-1} : int8_t{1};
    const std::vector<int> truth = transmit_indices(bits, c16, 3);
    CVector s(3);
    for (int i = 0; i < 3; ++i) s[static_cast<std::size_t>(i)] = c16.point(truth[static_cast<std::size_t>(i)]);
    CHECK(ml_detect(h, mat_vec(h, s), c16) == truth);

    // all-zero observation on the identity channel: every point ties per
    // stream, the first-enumerated vector (point index 0 everywhere) wins
    const Constellation qpsk = build_qam(4);
    const std::vector<int> tie = ml_detect(CMatrix::identity(2), CVector(2, cx{0.0, 0.0}), qpsk);
    CHECK(tie == std::vector<int>{0, 0});
}

TEST_CASE("hard ml agrees with the exact reliability minimizer") {
    const Constellation c = build_qam(16);
    for (std::uint64_t t = 0; t < 10; ++t) {
        const Instance inst = random_instance(3, 3, c, 12.0, 52, t);
        const std::vector<int> ml = ml_detect(inst.h, inst.y, c);
        // the sign pattern of the exact reliabilities is the label of the minimizer
        const LlrVector llr = maxlog_llr_exact(inst.h, inst.y, c, inst.sigma);
        for (int stream = 0; stream < 3; ++stream)
            for (int b = 0; b < 4; ++b) {
                const double v = llr[static_cast<std::size_t>(stream * 4 + b)];
                if (v != 0.0)
                    CHECK(c.label_bit(ml[static_cast<std::size_t>(stream)], b) == (v > 0.0 ? 1 : -1));
            }
    }
}

TEST_CASE("single-layer tree detection at zero noise pins the transmitted symbol") {
    const Constellation c = build_qam(4);
    CMatrix h(1, 1);
    h(0, 0) = 1.0;
    const double sigma = 0.1;
    const auto qr = regularized_qr(h, sigma, c.mean_abs);
    DareConfig cfg;
    cfg.n_c = 4;
    for (int p = 0; p < 4; ++p) {
        const CVector y(1, c.point(p));
        const DareResult res = dare_detect(qr, y, c, sigma, cfg);
        const int best = best_candidate(res.candidates);
        CHECK(res.candidates.symbol(1, best) == p);
        for (int b = 0; b < 2; ++b)
            CHECK((res.llr[static_cast<std::size_t>(b)] >= 0.0 ? 1 : -1) == c.label_bit(p, b));
    }
}

TEST_CASE("unpruned tree detection tracks brute-force ml on a small system") {
    const Constellation c = build_qam(4);
    DareConfig cfg;
    cfg.n_c = 4;
    cfg.delta_d = 1e6;
    cfg.llr_clamp = 1e6;
    const int trials = 10000;
    int agree = 0;
#pragma omp parallel for reduction(+ : agree) schedule(dynamic, 64)
    for (int t = 0; t < trials; ++t) {
        const Instance inst = random_instance(2, 2, c, 10.0, 53, static_cast<std::uint64_t>(t));
        const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
        const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
        const int best = best_candidate(res.candidates);
        const std::vector<int> ml = ml_detect(inst.h, inst.y, c);
        bool same = true;
        for (int l = 1; l <= 2; ++l)
            if (res.candidates.symbol(l, best) != ml[static_cast<std::size_t>(l - 1)]) same = false;
        if (same) ++agree;
    }
    CHECK(static_cast<double>(agree) / trials >= 0.99);
}

TEST_CASE("reliability signs track the exact ones on a 4x4 16-qam system") {
    const Constellation c = build_qam(16);
    DareConfig cfg;
    cfg.n_c = 8;
    const int trials = 10000;
    const int nbits = 16;
    long long agree = 0;
#pragma omp parallel for reduction(+ : agree) schedule(dynamic, 16)
    for (int t = 0; t < trials; ++t) {
        const Instance inst = random_instance(4, 4, c, 14.0, 54, static_cast<std::uint64_t>(t));
        const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
        const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
        const LlrVector exact = maxlog_llr_exact(inst.h, inst.y, c, inst.sigma);
        for (int b = 0; b < nbits; ++b)
            if ((res.llr[static_cast<std::size_t>(b)] >= 0.0) == (exact[static_cast<std::size_t>(b)] >= 0.0)) ++agree;
    }
    // measured 0.969..0.972 across seeds at this operating point
    CHECK(static_cast<double>(agree) / (static_cast<double>(trials) * nbits) >= 0.965);
}

TEST_CASE("candidate metrics equal their direct recomputation") {
    for (const auto& [m, k] : {std::pair{4, 4}, std::pair{8, 4}, std::pair{8, 8}}) {
        const Constellation c = build_qam(16);
        DareConfig cfg;
        cfg.n_c = 8;
        for (std::uint64_t t = 0; t < 10; ++t) {
            const Instance inst = random_instance(m, k, c, 14.0, 55, t);
            const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
            const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
            for (int n = 0; n < res.candidates.active; ++n) {
                const double direct = testref::recompute_metric(qr, inst.y, c, inst.sigma, res.candidates, n);
                const double stored = res.candidates.metrics[static_cast<std::size_t>(n)];
                CHECK(std::abs(direct - stored) <= 1e-9 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST_CASE("instrumentation stays under the bound and phases add up") {
    struct Shape {
        int m, k, nc;
    };
    for (const Shape& sh : {Shape{4, 4, 4}, Shape{8, 8, 8}, Shape{16, 8, 4}, Shape{64, 12, 4}, Shape{12, 12, 8}}) {
        const auto [m, k, nc] = sh;
        const Constellation c = build_qam(16);
        DareConfig cfg;
        cfg.n_c = nc;
        const std::uint64_t bound = max_complexity_bound(m, k, nc);
        for (std::uint64_t t = 0; t < 20; ++t) {
            const Instance inst = random_instance(m, k, c, 18.0, 56, t);
            const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
            const ComplexityReport rep = dare_detect(qr, inst.y, c, inst.sigma, cfg).complexity;
            CHECK(rep.real_mults() == rep.matched_filter + rep.layer_metrics + rep.misc);
            CHECK(rep.matched_filter == 4ull * static_cast<unsigned>(m) * static_cast<unsigned>(k));
            CHECK(rep.real_mults() <= bound);
        }
    }
}

TEST_CASE("reliability output respects the sign and clamp contract") {
    const Constellation c = build_qam(16);
    DareConfig cfg;
    cfg.n_c = 8;
    cfg.llr_clamp = 8.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const Instance inst = random_instance(6, 4, c, 10.0, 57, t);
        const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
        const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
        const int best = best_candidate(res.candidates);
        for (std::size_t b = 0; b < res.llr.size(); ++b) {
            CHECK(std::abs(res.llr[b]) <= cfg.llr_clamp);
            CHECK(res.llr[b] * res.candidates.label(static_cast<int>(b), best) >= 0.0);
            if (res.llr[b] != 0.0)
                CHECK((res.llr[b] > 0.0 ? 1 : -1) == res.candidates.label(static_cast<int>(b), best));
        }
        // labels are the concatenated point labels of the column
        for (int n = 0; n < res.candidates.active; ++n)
            for (int l = 1; l <= 4; ++l)
                for (int b = 0; b < 4; ++b)
                    CHECK(res.candidates.label((l - 1) * 4 + b, n) ==
                          c.label_bit(res.candidates.symbol(l, n), b));
    }
}

TEST_CASE("a larger candidate budget never worsens the best metric when unpruned") {
    const Constellation c = build_qam(16);
    for (std::uint64_t t = 0; t < 30; ++t) {
        const Instance inst = random_instance(4, 4, c, 12.0, 58, t);
        const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
        double prev = std::numeric_limits<double>::infinity();
        for (int nc : {1, 2, 4, 8}) {
            DareConfig cfg;
            cfg.n_c = nc;
            cfg.delta_d = 1e6;
            const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
            const double d1 = res.candidates.metrics[static_cast<std::size_t>(best_candidate(res.candidates))];
            CHECK(d1 <= prev + 1e-12);
            prev = d1;
        }
    }
}

TEST_CASE("sign agreement with the exact reference improves with the budget") {
    const Constellation c = build_qam(4);
    const int trials = 10000;
    const int nbits = 4;
    long long agree[3] = {0, 0, 0};
    const int ncs[3] = {1, 2, 4};
#pragma omp parallel for schedule(dynamic, 64)
    for (int t = 0; t < trials; ++t) {
        const Instance inst = random_instance(2, 2, c, 11.0, 59, static_cast<std::uint64_t>(t));
        const auto qr = regularized_qr(inst.h, inst.sigma, c.mean_abs);
        const LlrVector exact = maxlog_llr_exact(inst.h, inst.y, c, inst.sigma);
        for (int i = 0; i < 3; ++i) {
            DareConfig cfg;
            cfg.n_c = ncs[i];
            const DareResult res = dare_detect(qr, inst.y, c, inst.sigma, cfg);
            long long local = 0;
            for (int b = 0; b < nbits; ++b)
                if ((res.llr[static_cast<std::size_t>(b)] >= 0.0) == (exact[static_cast<std::size_t>(b)] >= 0.0))
                    ++local;
#pragma omp atomic
            agree[i] += local;
        }
    }
    CHECK(agree[0] <= agree[1]);
    CHECK(agree[1] <= agree[2]);
}

TEST_CASE("invalid detection inputs are rejected") {
    const Constellation c = build_qam(4);
    const auto qr = regularized_qr(CMatrix::identity(2), 0.1, c.mean_abs);
    DareConfig cfg;
    CHECK_THROWS(dare_detect(qr, CVector(2), c, 0.0, cfg));  // metrics divide by sigma^2
    CHECK_THROWS(dare_detect(qr, CVector(3), c, 0.1, cfg));
    DareConfig bad;
    bad.n_c = 0;
    CHECK_THROWS(dare_detect(qr, CVector(2), c, 0.1, bad));
    CHECK_THROWS(maxlog_llr_exact(CMatrix::identity(2), CVector(2), c, 0.0));
    const Constellation c64 = build_qam(64);
    CHECK_THROWS(maxlog_llr_exact(CMatrix::identity(4), CVector(4), c64, 1.0));  // 64^4 > 2^20
}

}  // TEST_SUITE
