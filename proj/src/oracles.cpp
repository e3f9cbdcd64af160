#include <cmath>
#include <limits>
#include <stdexcept>

#include "mimo/detectors.hpp"

namespace mimo {

namespace {

void check_enumeration_guard(int k, const Constellation& c) {
    const int total_bits = k * c.bits_per_symbol();
    if (total_bits > 20) throw std::invalid_argument("enumeration guard: |O|^K exceeds 2^20");
}

}  // namespace

LlrVector maxlog_llr_exact(const CMatrix& h, const CVector& y, const Constellation& c, double sigma) {
    const int m = static_cast<int>(h.rows());
    const int k = static_cast<int>(h.cols());
    if (sigma <= 0.0) throw std::invalid_argument("maxlog_llr_exact: sigma must be positive");
    if (y.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("maxlog_llr_exact: dimension mismatch");
    check_enumeration_guard(k, c);

    const int bps = c.bits_per_symbol();
    const int nbits = k * bps;
    const double inv_sigma2 = 1.0 / (sigma * sigma);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> min_pos(static_cast<std::size_t>(nbits), inf);
    std::vector<double> min_neg(static_cast<std::size_t>(nbits), inf);
    std::vector<int> chosen(static_cast<std::size_t>(k), 0);

    // Depth-first over streams 0..k-1 with running residuals, one stream's
    // column subtracted per level.
    std::vector<CVector> resid(static_cast<std::size_t>(k) + 1, CVector(static_cast<std::size_t>(m)));
    resid[0] = y;

    auto rec = [&](auto&& self, int t) -> void {
        for (int p = 0; p < c.order; ++p) {
            chosen[static_cast<std::size_t>(t)] = p;
            const cx s = c.point(p);
            CVector& next = resid[static_cast<std::size_t>(t) + 1];
            const CVector& curr = resid[static_cast<std::size_t>(t)];
            for (int i = 0; i < m; ++i)
                next[static_cast<std::size_t>(i)] =
                    curr[static_cast<std::size_t>(i)] - h(static_cast<std::size_t>(i), static_cast<std::size_t>(t)) * s;
            if (t + 1 < k) {
                self(self, t + 1);
            } else {
                double d = 0.0;
                for (const cx& v : next) d += std::norm(v);
                d *= inv_sigma2;
                for (int stream = 0; stream < k; ++stream) {
                    const int sym = chosen[static_cast<std::size_t>(stream)];
                    for (int b = 0; b < bps; ++b) {
                        const int bit = stream * bps + b;
                        if (c.label_bit(sym, b) > 0) {
                            if (d < min_pos[static_cast<std::size_t>(bit)]) min_pos[static_cast<std::size_t>(bit)] = d;
                        } else {
                            if (d < min_neg[static_cast<std::size_t>(bit)]) min_neg[static_cast<std::size_t>(bit)] = d;
                        }
                    }
                }
            }
        }
    };
    rec(rec, 0);

    LlrVector llr(static_cast<std::size_t>(nbits));
    for (int b = 0; b < nbits; ++b)
        llr[static_cast<std::size_t>(b)] = min_neg[static_cast<std::size_t>(b)] - min_pos[static_cast<std::size_t>(b)];
    return llr;
}

std::vector<int> ml_detect(const CMatrix& h, const CVector& y, const Constellation& c) {
    const int m = static_cast<int>(h.rows());
    const int k = static_cast<int>(h.cols());
    if (y.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("ml_detect: dimension mismatch");
    check_enumeration_guard(k, c);

    std::vector<int> best(static_cast<std::size_t>(k), 0);
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    double best_d = std::numeric_limits<double>::infinity();

    // Enumerate top-down so stream 0 cycles fastest; strict comparison keeps
    // the first-enumerated vector on ties.
    std::vector<CVector> partial(static_cast<std::size_t>(k) + 1, CVector(static_cast<std::size_t>(m)));
    partial[static_cast<std::size_t>(k)] = y;

    auto rec = [&](auto&& self, int t) -> void {
        for (int p = 0; p < c.order; ++p) {
            idx[static_cast<std::size_t>(t)] = p;
            const cx s = c.point(p);
            CVector& next = partial[static_cast<std::size_t>(t)];
            const CVector& curr = partial[static_cast<std::size_t>(t) + 1];
            for (int i = 0; i < m; ++i)
                next[static_cast<std::size_t>(i)] =
                    curr[static_cast<std::size_t>(i)] - h(static_cast<std::size_t>(i), static_cast<std::size_t>(t)) * s;
            if (t > 0) {
                self(self, t - 1);
            } else {
                double d = 0.0;
                for (const cx& v : next) d += std::norm(v);
                if (d < best_d) {
                    best_d = d;
                    best = idx;
                }
            }
        }
    };
    rec(rec, k - 1);
    return best;
}

}  // namespace mimo
