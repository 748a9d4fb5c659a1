#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace keyecho {

/// Mono recording with samples normalized to [-1, 1]. Immutable once built.
class AudioSignal {
public:
    /// Throws Error(InvalidArgument) if any sample is outside [-1, 1] (or NaN)
    /// or the rate is zero.
    AudioSignal(std::vector<double> samples, std::uint32_t sample_rate);

    std::span<const double> samples() const noexcept { return samples_; }
    std::uint32_t sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration_seconds() const noexcept {
        return static_cast<double>(samples_.size()) / sample_rate_;
    }

private:
    std::vector<double> samples_;
    std::uint32_t sample_rate_;
};

/// Reads an uncompressed RIFF/WAVE file (PCM 8/16/24/32-bit or 32-bit float,
/// mono or stereo, WAVE_FORMAT_EXTENSIBLE accepted). Stereo is averaged to
/// mono; integer samples are divided by the magnitude of the most negative
/// value of their type.
AudioSignal load_wav(const std::filesystem::path& path);

/// Same as load_wav, from an in-memory image of the file.
AudioSignal parse_wav(std::span<const std::uint8_t> bytes);

/// Writes 16-bit PCM mono. Samples are scaled by 32768 and clamped, so a
/// signal produced by load_wav from a 16-bit file is written back unchanged.
void write_wav16(const std::filesystem::path& path, const AudioSignal& signal);
std::vector<std::uint8_t> encode_wav16(const AudioSignal& signal);

/// round(ms * rate / 1000).
std::size_t ms_to_samples(double ms, std::uint32_t rate);

} // namespace keyecho
