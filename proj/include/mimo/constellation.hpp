#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mimo/linalg.hpp"

namespace mimo {

/// Square Gray-mapped QAM constellation with unit average energy.
///
/// Bit labels are bipolar tuples (+1 <-> binary 0) with the in-phase bits
/// first, most significant bit first within each axis. Per-axis labels are
/// binary-reflected Gray codes assigned from the most positive level down,
/// so the sign bit of each axis is +1 on positive levels.
struct Constellation {
    int order = 0;            ///< |O|, one of 4 / 16 / 64
    int levels_per_axis = 0;  ///< sqrt(order)
    int bits_per_axis = 0;
    double d_qam = 0.0;       ///< nearest-neighbor spacing
    double mean_abs = 0.0;    ///< E{|s|}, used by the regularization rule

    std::vector<double> axis_levels;            ///< ascending PAM levels
    std::vector<cx> points;                     ///< index = i_axis * L + q_axis
    std::vector<std::array<int8_t, 6>> labels;  ///< bipolar bits per point
    std::vector<double> norms2;                 ///< |point|^2 lookup

    int bits_per_symbol() const { return 2 * bits_per_axis; }

    /// Nearest PAM level index for one axis value; exact midpoints resolve
    /// toward the level of smaller magnitude.
    int slice_axis(double u) const;

    /// Index of the nearest constellation point (per-axis slicing with
    /// clipping at the outermost levels).
    int slice_index(cx y) const;

    /// Nearest constellation point as a value.
    cx slice(cx y) const { return points[static_cast<std::size_t>(slice_index(y))]; }

    cx point(int idx) const { return points[static_cast<std::size_t>(idx)]; }
    int8_t label_bit(int point_idx, int bit) const {
        return labels[static_cast<std::size_t>(point_idx)][static_cast<std::size_t>(bit)];
    }

    /// Point index for a bipolar label of bits_per_symbol() entries.
    int index_of_label(const int8_t* bits) const;
};

Constellation build_qam(int order);

/// The first (up to) four constellation points closest to y, starting from
/// the sliced point s1 and stepping by d_qam along the axis of larger offset
/// first, then the other axis, then the diagonal. Steps that clip onto an
/// already-listed point at the constellation edge are dropped.
struct NeighborOrdering {
    std::array<int, 4> idx{};
    int count = 0;
};

NeighborOrdering order_neighbors(cx y, int s1_idx, const Constellation& c);

/// Maximum number of children granted to a node whose normalized observable
/// is y with sliced point s1: 1 inside the central sub-square of the decision
/// cell, 2 when exactly one axis offset exceeds the threshold, 4 when both
/// do; capped by n_c and by the distinct neighbors actually available.
/// threshold <= 0 selects the default d_qam / 8.
int jmax_region(cx y, int s1_idx, const Constellation& c, int n_c, double threshold = 0.0);

}  // namespace mimo
