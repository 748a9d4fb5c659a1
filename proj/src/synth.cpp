#include "keyecho/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "keyecho/error.hpp"

namespace keyecho {

double TypistProfile::std_of(KeyPair pair) const {
    const auto it = pair_stds.find(pair);
    return it == pair_stds.end() ? 0.0 : it->second;
}

void TypistProfile::validate() const {
    if (!(burst_ms > 0.0)) throw Error(ErrorCode::InvalidArgument, "burst_ms must be > 0");
    if (!(burst_amp > 0.0 && burst_amp <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "burst_amp must be in (0, 1]");
    }
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_std must be >= 0");
    for (const auto& [pair, mean] : pair_means) {
        if (!(mean > burst_ms)) {
            throw Error(ErrorCode::InvalidArgument,
                        "mean for '" + pair.str() + "' must exceed burst_ms so clicks cannot overlap");
        }
    }
    for (const auto& [pair, sd] : pair_stds) {
        if (!(sd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative std for '" + pair.str() + "'");
    }
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

SynthSession synth_session(const TypistProfile& profile, std::span<const std::string> words,
                           std::uint64_t stream) {
    profile.validate();
    auto rng = derived_rng(profile.seed, stream);
    const double hold_ms = 0.8 * profile.burst_ms;
    const double floor_ms = profile.burst_ms + 1.0;

    SynthSession out;
    out.session.session_id = "synth-" + std::to_string(profile.seed) + "-" + std::to_string(stream);
    double origin = 0.0;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto& word = words[w];
        if (word.empty() || !std::all_of(word.begin(), word.end(), is_letter)) {
            throw Error(ErrorCode::InvalidArgument, "word '" + word + "' is not lowercase a-z");
        }
        std::vector<double> onsets{0.0};
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            const KeyPair pair{word[i], word[i + 1]};
            const auto mean = profile.pair_means.find(pair);
            if (mean == profile.pair_means.end()) {
                throw Error(ErrorCode::UnknownPair, "profile has no mean for '" + pair.str() + "'");
            }
            const double sd = profile.std_of(pair);
            double draw = mean->second;
            if (sd > 0.0) draw = std::normal_distribution<double>(mean->second, sd)(rng);
            ++out.intervals;
            if (draw < floor_ms) {
                draw = floor_ms;
                ++out.truncated;
            }
            onsets.push_back(onsets.back() + draw);
        }
        for (std::size_t i = 0; i < word.size(); ++i) {
            KeystrokeEvent ev;
            ev.key = Key::letter(word[i]);
            ev.press_ms = origin + onsets[i];
            ev.release_ms = ev.press_ms + hold_ms;
            ev.virtual_code = 0x41 + letter_index(word[i]);
            out.session.events.push_back(ev);
        }
        if (w + 1 < words.size()) {
            KeystrokeEvent space;
            space.key = Key::space();
            space.press_ms = origin + onsets.back() + kWordGapMs;
            space.release_ms = space.press_ms + hold_ms;
            space.virtual_code = 0x20;
            out.session.events.push_back(space);
            origin = space.press_ms + kWordGapMs;
        }
        out.word_onsets_ms.push_back(std::move(onsets));
    }
    return out;
}

AudioSignal synth_audio(std::span<const double> onsets_ms, const TypistProfile& profile,
                        std::uint32_t sample_rate, double total_ms, std::uint64_t stream) {
    profile.validate();
    if (sample_rate == 0 || !(total_ms > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need a positive sample rate and duration");
    }
    const std::size_t length = ms_to_samples(total_ms, sample_rate);
    const std::size_t burst_len = std::max<std::size_t>(1, ms_to_samples(profile.burst_ms, sample_rate));

    std::vector<double> samples(length, 0.0);
    if (profile.noise_std > 0.0) {
        // Separate domain from synth_session so noise and timing draws are
        // independent for the same (seed, stream).
        auto rng = derived_rng(profile.seed ^ 0x9E3779B97F4A7C15ull, stream);
        std::normal_distribution<double> noise(0.0, profile.noise_std);
        for (double& s : samples) s = noise(rng);
    }
    for (double onset : onsets_ms) {
        if (!(onset >= 0.0)) throw Error(ErrorCode::OnsetOutOfRange, "negative onset");
        const std::size_t start = ms_to_samples(onset, sample_rate);
        if (start + burst_len > length) {
            throw Error(ErrorCode::OnsetOutOfRange, "burst at " + std::to_string(onset) +
                                                        " ms does not fit in " +
                                                        std::to_string(total_ms) + " ms");
        }
        for (std::size_t j = 0; j < burst_len; ++j) {
            const double frac = burst_len > 1 ? static_cast<double>(j) / (burst_len - 1) : 0.0;
            const double envelope = profile.burst_amp * (1.0 - 0.9 * frac);
            samples[start + j] += (j % 2 == 0) ? envelope : -envelope;
        }
    }
    for (double& s : samples) s = std::clamp(s, -1.0, 1.0);
    return AudioSignal(std::move(samples), sample_rate);
}

AudioSignal synth_word_audio(std::span<const double> word_onsets_ms, const TypistProfile& profile,
                             std::uint32_t sample_rate, std::uint64_t stream) {
    std::vector<double> shifted(word_onsets_ms.begin(), word_onsets_ms.end());
    for (double& t : shifted) t += kWordPaddingMs;
    const double last = shifted.empty() ? kWordPaddingMs : shifted.back();
    return synth_audio(shifted, profile, sample_rate, last + profile.burst_ms + kWordPaddingMs, stream);
}

std::vector<KeyPair> word_pairs(std::span<const std::string> words) {
    std::set<KeyPair> pairs;
    for (const auto& w : words) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) pairs.insert({w[i], w[i + 1]});
    }
    return {pairs.begin(), pairs.end()};
}

TypistProfile random_profile(std::span<const std::string> words, double min_mean_ms,
                             double max_mean_ms, double std_ms, std::uint64_t seed) {
    TypistProfile profile;
    profile.seed = seed;
    auto rng = derived_rng(seed, ~std::uint64_t{0});
    std::uniform_real_distribution<double> mean(min_mean_ms, max_mean_ms);
    for (const auto& pair : word_pairs(words)) {
        profile.pair_means[pair] = mean(rng);
        profile.pair_stds[pair] = std_ms;
    }
    return profile;
}

} // namespace keyecho
