#include "keyecho/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "keyecho/error.hpp"

namespace keyecho {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_{};
    double comp_{};
};

double window_sum(std::span<const double> samples, std::size_t begin, std::size_t len) {
    CompensatedSum acc;
    for (std::size_t t = begin; t < begin + len; ++t) acc.add(std::abs(samples[t]));
    return acc.value();
}

} // namespace

EnergyArray energy(std::span<const double> samples, std::size_t frame_len,
                   std::uint32_t sample_rate) {
    if (frame_len == 0) throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
    if (frame_len > samples.size()) {
        throw Error(ErrorCode::FrameTooLong, "frame of " + std::to_string(frame_len) +
                                                 " samples exceeds signal of " +
                                                 std::to_string(samples.size()));
    }
    const std::size_t windows = samples.size() - frame_len + 1;
    EnergyArray out{std::vector<double>(windows), frame_len, sample_rate};

    CompensatedSum running;
    for (std::size_t i = 0; i < windows; ++i) {
        if (i % kEnergyRefreshPeriod == 0) {
            running = CompensatedSum{};
            running.add(window_sum(samples, i, frame_len));
        } else {
            running.add(std::abs(samples[i + frame_len - 1]));
            running.add(-std::abs(samples[i - 1]));
        }
        out.values[i] = std::max(0.0, running.value());
    }
    return out;
}

EnergyArray energy(const AudioSignal& signal, std::size_t frame_len) {
    return energy(signal.samples(), frame_len, signal.sample_rate());
}

OnsetList pick_onsets(const EnergyArray& energy, std::size_t k, std::size_t min_gap) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");

    std::vector<double> f = energy.values;
    OnsetList out{{}, energy.frame_len, energy.sample_rate};
    out.onsets.reserve(k);
    for (std::size_t n = 0; n < k; ++n) {
        const auto it = std::max_element(f.begin(), f.end());
        if (it == f.end() || *it <= 0.0) {
            throw Error(ErrorCode::NotEnoughPeaks, "found " + std::to_string(n) + " of " +
                                                       std::to_string(k) + " keystrokes");
        }
        const auto b = static_cast<std::size_t>(it - f.begin());
        out.onsets.push_back(b);

        const std::size_t lo = b >= min_gap ? b - min_gap + 1 : 0;
        const std::size_t hi = std::min(f.size(), b + energy.frame_len + min_gap);
        std::fill(f.begin() + static_cast<std::ptrdiff_t>(std::min(lo, hi)),
                  f.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
        f[b] = 0.0;
    }
    std::sort(out.onsets.begin(), out.onsets.end());
    return out;
}

IntervalSequence intervals(const OnsetList& onsets) {
    if (onsets.onsets.size() < 2) {
        throw Error(ErrorCode::TooFewOnsets, "need at least two onsets");
    }
    IntervalSequence out;
    out.deltas_ms.reserve(onsets.onsets.size() - 1);
    for (std::size_t i = 0; i + 1 < onsets.onsets.size(); ++i) {
        const auto gap = static_cast<double>(onsets.onsets[i + 1] - onsets.onsets[i]);
        out.deltas_ms.push_back(gap * 1000.0 / onsets.sample_rate);
    }
    return out;
}

std::vector<SampleRange> extract_segments(const AudioSignal& signal, const OnsetList& onsets) {
    std::vector<SampleRange> out;
    out.reserve(onsets.onsets.size());
    for (std::size_t b : onsets.onsets) {
        const std::size_t begin = std::min(b, signal.size());
        out.push_back({begin, std::min(begin + onsets.frame_len, signal.size())});
    }
    return out;
}

std::vector<std::filesystem::path> write_segments(const AudioSignal& signal,
                                                  std::span<const SampleRange> ranges,
                                                  const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    const auto samples = signal.samples();
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const auto& r = ranges[i];
        if (r.end <= r.begin) continue;
        char name[32];
        std::snprintf(name, sizeof name, "segment_%03zu.wav", i + 1);
        std::vector<double> part(samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
                                 samples.begin() + static_cast<std::ptrdiff_t>(r.end));
        auto path = dir / name;
        write_wav16(path, AudioSignal(std::move(part), signal.sample_rate()));
        written.push_back(std::move(path));
    }
    return written;
}

void write_onsets_csv(std::ostream& out, const OnsetList& onsets) {
    out << "index,onset_sample,onset_ms,delta_ms\n";
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < onsets.onsets.size(); ++i) {
        out << i << ',' << onsets.onsets[i] << ',' << onsets.onset_ms(i) << ',';
        if (i > 0) {
            const auto gap = static_cast<double>(onsets.onsets[i] - onsets.onsets[i - 1]);
            out << gap * 1000.0 / onsets.sample_rate;
        }
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace keyecho
