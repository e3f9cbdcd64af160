#include "mimo/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace mimo {

namespace {

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline int gray_rank(int g) {
    // inverse of g = r ^ (r >> 1) for up to 3 bits
    int r = g;
    r ^= r >> 1;
    r ^= r >> 2;
    return r;
}

}  // namespace

Constellation build_qam(int order) {
    if (order != 4 && order != 16 && order != 64)
        throw std::invalid_argument("build_qam: unsupported order (use 4, 16 or 64)");

    Constellation c;
    c.order = order;
    int l = 2;
    while (l * l < order) l *= 2;
    c.levels_per_axis = l;
    c.bits_per_axis = 0;
    for (int v = l; v > 1; v /= 2) ++c.bits_per_axis;

    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    c.d_qam = 2.0 * scale;
    c.axis_levels.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) c.axis_levels[static_cast<std::size_t>(i)] = (2 * i - l + 1) * scale;

    // Per-axis Gray code assigned from the most positive level downward so
    // the all-(+1) label lands on the most positive level of each axis.
    auto axis_bits = [&](int level_idx, int8_t* out) {
        const int rank = l - 1 - level_idx;
        const int g = rank ^ (rank >> 1);
        for (int t = 0; t < c.bits_per_axis; ++t) {
            const int bit = (g >> (c.bits_per_axis - 1 - t)) & 1;
            out[t] = bit == 0 ? int8_t{1} : int8_t{-1};
        }
    };

    c.points.resize(static_cast<std::size_t>(order));
    c.labels.resize(static_cast<std::size_t>(order));
    c.norms2.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < l; ++i) {
        for (int q = 0; q < l; ++q) {
            const int idx = i * l + q;
            const cx p(c.axis_levels[static_cast<std::size_t>(i)], c.axis_levels[static_cast<std::size_t>(q)]);
            c.points[static_cast<std::size_t>(idx)] = p;
            c.norms2[static_cast<std::size_t>(idx)] = std::norm(p);
            auto& lab = c.labels[static_cast<std::size_t>(idx)];
            lab.fill(0);
            axis_bits(i, lab.data());
            axis_bits(q, lab.data() + c.bits_per_axis);
        }
    }

    double sum_abs = 0.0;
    for (const cx& p : c.points) sum_abs += std::abs(p);
    c.mean_abs = sum_abs / order;
    return c;
}

int Constellation::slice_axis(double u) const {
    int best = 0;
    double best_d = std::abs(u - axis_levels[0]);
    for (int i = 1; i < levels_per_axis; ++i) {
        const double d = std::abs(u - axis_levels[static_cast<std::size_t>(i)]);
        if (d < best_d ||
            (d == best_d && std::abs(axis_levels[static_cast<std::size_t>(i)]) <
                                std::abs(axis_levels[static_cast<std::size_t>(best)]))) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

int Constellation::slice_index(cx y) const {
    return slice_axis(y.real()) * levels_per_axis + slice_axis(y.imag());
}

int Constellation::index_of_label(const int8_t* bits) const {
    auto axis_index = [&](const int8_t* b) {
        int g = 0;
        for (int t = 0; t < bits_per_axis; ++t) g = (g << 1) | (b[t] > 0 ? 0 : 1);
        return levels_per_axis - 1 - gray_rank(g);
    };
    return axis_index(bits) * levels_per_axis + axis_index(bits + bits_per_axis);
}

NeighborOrdering order_neighbors(cx y, int s1_idx, const Constellation& c) {
    if (s1_idx < 0 || s1_idx >= c.order)
        throw std::invalid_argument("order_neighbors: s1 is not a constellation point");

    const cx s1 = c.point(s1_idx);
    const cx delta = y - s1;
    // sign(0) pinned to +1; ties only matter on measure-zero inputs
    const double step_re = sgn(delta.real()) * c.d_qam;
    const double step_im = sgn(delta.imag()) * c.d_qam;

    std::array<cx, 4> cand;
    cand[0] = s1;
    if (std::abs(delta.real()) > std::abs(delta.imag())) {
        cand[1] = s1 + cx(step_re, 0.0);
        cand[2] = s1 + cx(0.0, step_im);
    } else {
        cand[1] = s1 + cx(0.0, step_im);
        cand[2] = s1 + cx(step_re, 0.0);
    }
    cand[3] = s1 + cx(step_re, step_im);

    NeighborOrdering out;
    for (const cx& p : cand) {
        const int idx = c.slice_index(p);  // clips at the edges
        bool dup = false;
        for (int i = 0; i < out.count; ++i)
            if (out.idx[static_cast<std::size_t>(i)] == idx) dup = true;
        if (!dup) out.idx[static_cast<std::size_t>(out.count++)] = idx;
    }
    return out;
}

int jmax_region(cx y, int s1_idx, const Constellation& c, int n_c, double threshold) {
    if (n_c < 1) throw std::invalid_argument("jmax_region: n_c < 1");
    const cx delta = y - c.point(s1_idx);
    const double t = threshold > 0.0 ? threshold : c.d_qam / 8.0;
    const bool re_out = std::abs(delta.real()) > t;
    const bool im_out = std::abs(delta.imag()) > t;
    int region = 1;
    if (re_out && im_out)
        region = 4;
    else if (re_out || im_out)
        region = 2;
    const int avail = order_neighbors(y, s1_idx, c).count;
    return std::min(std::min(region, n_c), avail);
}

}  // namespace mimo
