#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "keyecho/audio.hpp"

namespace keyecho {

/// Sum of |sample| over every full window of `frame_len` samples (hop 1).
struct EnergyArray {
    std::vector<double> values;
    std::size_t frame_len{};
    std::uint32_t sample_rate{};
};

/// Keystroke onsets as ascending sample indices.
struct OnsetList {
    std::vector<std::size_t> onsets;
    std::size_t frame_len{};
    std::uint32_t sample_rate{};

    double onset_ms(std::size_t i) const {
        return static_cast<double>(onsets.at(i)) * 1000.0 / sample_rate;
    }
};

struct IntervalSequence {
    std::vector<double> deltas_ms;
};

/// Half-open sample range [begin, end).
struct SampleRange {
    std::size_t begin{};
    std::size_t end{};

    bool operator==(const SampleRange&) const = default;
};

/// Windows recomputed from scratch at this period to bound running-sum drift.
inline constexpr std::size_t kEnergyRefreshPeriod = std::size_t{1} << 16;

EnergyArray energy(std::span<const double> samples, std::size_t frame_len,
                   std::uint32_t sample_rate);
EnergyArray energy(const AudioSignal& signal, std::size_t frame_len);

/// Iterative maximum extraction. Each round takes the argmax of the remaining
/// energy (smallest index on ties), then zeroes every index i with
/// b - min_gap < i < b + frame_len + min_gap. The picked index is always
/// cleared, even for min_gap = 0. Throws NotEnoughPeaks when the remaining
/// maximum is zero before k onsets are found.
OnsetList pick_onsets(const EnergyArray& energy, std::size_t k, std::size_t min_gap);

/// Millisecond gaps between consecutive onsets. Throws TooFewOnsets for k < 2.
IntervalSequence intervals(const OnsetList& onsets);

/// [b, min(b + frame_len, length)) for every onset.
std::vector<SampleRange> extract_segments(const AudioSignal& signal, const OnsetList& onsets);

/// Dumps each range as `segment_NNN.wav` (16-bit mono) under `dir`.
std::vector<std::filesystem::path> write_segments(const AudioSignal& signal,
                                                  std::span<const SampleRange> ranges,
                                                  const std::filesystem::path& dir);

/// CSV with columns index,onset_sample,onset_ms,delta_ms. delta_ms is the gap
/// to the previous onset and is left empty on the first row.
void write_onsets_csv(std::ostream& out, const OnsetList& onsets);

} // namespace keyecho
