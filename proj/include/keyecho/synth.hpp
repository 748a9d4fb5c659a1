#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "keyecho/audio.hpp"
#include "keyecho/keylog.hpp"
#include "keyecho/keys.hpp"

namespace keyecho {

/// Synthetic typist. Intervals for a pair are drawn from
/// N(pair_means[p], pair_stds[p]) and clicks are linearly decaying bursts.
struct TypistProfile {
    std::map<KeyPair, double> pair_means;
    std::map<KeyPair, double> pair_stds;  // missing entries mean 0
    double burst_ms = 100.0;
    double burst_amp = 0.8;
    double noise_std = 0.0;
    std::uint64_t seed = 7;

    double std_of(KeyPair pair) const;

    /// Means > burst_ms, stds >= 0, 0 < burst_amp <= 1, noise_std >= 0.
    void validate() const;
};

/// Engine for one (seed, stream) pair. Independent streams let parallel
/// tasks generate reproducibly without sharing state.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream);

struct SynthSession {
    TypingSession session;
    /// Press times of each word relative to its first key (first entry 0).
    std::vector<std::vector<double>> word_onsets_ms;
    std::size_t intervals{};
    std::size_t truncated{};  // draws clamped up to burst_ms + 1

    double truncation_rate() const {
        return intervals == 0 ? 0.0 : static_cast<double>(truncated) / intervals;
    }
};

/// Time between the last key of a word and the following SPACE, and between
/// that SPACE and the next word.
inline constexpr double kWordGapMs = 400.0;

/// Types `words` one after another, separated by SPACE events. Within a word
/// t_1 = 0 and t_{i+1} = t_i + max(burst_ms + 1, N(mean, std)).
/// Throws UnknownPair when a word uses a pair missing from pair_means.
SynthSession synth_session(const TypistProfile& profile, std::span<const std::string> words,
                           std::uint64_t stream = 0);

/// Gaussian noise (noise_std, clipped to [-1, 1]) plus, at each onset, a burst
/// of burst_ms whose envelope falls linearly from burst_amp to 0.1 * burst_amp
/// on an alternating-sign carrier. Throws OnsetOutOfRange when an onset is
/// negative or its burst does not end by total_ms.
AudioSignal synth_audio(std::span<const double> onsets_ms, const TypistProfile& profile,
                        std::uint32_t sample_rate, double total_ms, std::uint64_t stream = 0);

/// Silence before the first and after the last click of a word recording.
inline constexpr double kWordPaddingMs = 250.0;

/// One word recording: onsets shifted by kWordPaddingMs with the same amount
/// of trailing room after the last burst.
AudioSignal synth_word_audio(std::span<const double> word_onsets_ms, const TypistProfile& profile,
                             std::uint32_t sample_rate, std::uint64_t stream = 0);

/// All distinct adjacent pairs of the given words, in (a, b) order.
std::vector<KeyPair> word_pairs(std::span<const std::string> words);

/// Profile covering every pair in `words` with means drawn uniformly from
/// [min_mean_ms, max_mean_ms] (seeded) and a common std.
TypistProfile random_profile(std::span<const std::string> words, double min_mean_ms,
                             double max_mean_ms, double std_ms, std::uint64_t seed);

} // namespace keyecho
