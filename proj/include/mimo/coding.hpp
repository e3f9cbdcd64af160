#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mimo {

/// Terminated constraint-length-7 convolutional code, generators 133/171
/// (octal), mother rate 1/2 with optional puncturing to 3/4.
struct CodeSpec {
    enum class Rate { half, three_quarters };
    Rate rate = Rate::three_quarters;
    int block_info_bits = 0;

    double rate_value() const { return rate == Rate::half ? 0.5 : 0.75; }
};

/// Punctured codeword length for one block (termination included).
std::size_t coded_length(const CodeSpec& spec);

/// Encode binary info bits; the trellis is driven back to state 0 by six
/// tail zeros before puncturing.
std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> info_bits, const CodeSpec& spec);

/// Max-log soft Viterbi over the terminated trellis. Input is one reliability
/// per punctured coded bit (positive means binary 0); punctured positions are
/// restored with zero reliability. Returns the decoded info bits.
std::vector<std::uint8_t> viterbi_decode_soft(std::span<const double> llr, const CodeSpec& spec);

}  // namespace mimo
