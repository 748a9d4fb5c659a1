#pragma once

// Test-only helpers: temporary directories, a raw WAV byte builder, and
// brute-force oracles that share no code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "keyecho/model.hpp"

namespace keyecho::test {

class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("keyecho-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Little-endian byte builder for hand-made WAV files.
struct Bytes {
    std::vector<std::uint8_t> data;

    Bytes& tag(const char* t) {
        data.insert(data.end(), t, t + 4);
        return *this;
    }
    Bytes& u16(std::uint16_t v) {
        data.push_back(v & 0xFF);
        data.push_back(v >> 8);
        return *this;
    }
    Bytes& u32(std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) data.push_back((v >> s) & 0xFF);
        return *this;
    }
    Bytes& i16(std::int16_t v) { return u16(static_cast<std::uint16_t>(v)); }
    Bytes& raw(const std::vector<std::uint8_t>& more) {
        data.insert(data.end(), more.begin(), more.end());
        return *this;
    }
};

/// RIFF/WAVE with a 16-byte fmt chunk (or 40-byte extensible) and the given
/// data payload. `declared_data` overrides the data chunk size field.
inline std::vector<std::uint8_t> make_wav(std::uint16_t format, std::uint16_t channels,
                                          std::uint32_t rate, std::uint16_t bits,
                                          const std::vector<std::uint8_t>& payload,
                                          bool extensible = false,
                                          std::int64_t declared_data = -1) {
    Bytes fmt;
    const std::uint16_t align = static_cast<std::uint16_t>(channels * bits / 8);
    fmt.u16(extensible ? 0xFFFE : format).u16(channels).u32(rate).u32(rate * align).u16(align).u16(bits);
    if (extensible) {
        fmt.u16(22).u16(bits).u32(0).u16(format);
        // remainder of the KSDATAFORMAT_SUBTYPE GUID
        const std::uint8_t guid_tail[] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80, 0x00,
                                          0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
        fmt.data.insert(fmt.data.end(), std::begin(guid_tail), std::end(guid_tail));
    }
    Bytes out;
    const auto data_size = declared_data >= 0 ? static_cast<std::uint32_t>(declared_data)
                                              : static_cast<std::uint32_t>(payload.size());
    out.tag("RIFF").u32(static_cast<std::uint32_t>(4 + 8 + fmt.data.size() + 8 + payload.size()));
    out.tag("WAVE").tag("fmt ").u32(static_cast<std::uint32_t>(fmt.data.size())).raw(fmt.data);
    out.tag("data").u32(data_size).raw(payload);
    return out.data;
}

namespace oracle {

/// Direct O(n * l) window sums.
inline std::vector<double> energy(const std::vector<double>& s, std::size_t l) {
    std::vector<double> out;
    for (std::size_t i = 0; i + l <= s.size(); ++i) {
        long double acc = 0;
        for (std::size_t t = i; t < i + l; ++t) acc += std::fabs(static_cast<long double>(s[t]));
        out.push_back(static_cast<double>(acc));
    }
    return out;
}

inline double tolerance(const TimingModel& m, double delta, double pct, double coeff) {
    return pct * delta + coeff * m.asd_ms();
}

inline bool pair_matches(const TimingModel& m, char a, char b, double delta, double t_f) {
    for (const auto& [pair, st] : m.stats()) {
        if (pair.a == a && pair.b == b) return st.mean_ms - t_f <= delta && delta <= st.mean_ms + t_f;
    }
    return false;
}

/// Scan of all 26 x 26 ordered pairs.
inline std::vector<Candidate> candidates(const TimingModel& m, double delta, double t_f,
                                         const std::string& allowed) {
    std::vector<Candidate> out;
    for (char a = 'a'; a <= 'z'; ++a) {
        if (allowed.find(a) == std::string::npos) continue;
        for (char b = 'a'; b <= 'z'; ++b) {
            if (pair_matches(m, a, b, delta, t_f)) out.push_back({{a, b}, m.find({a, b})->mean_ms});
        }
    }
    return out;
}

/// Every word over `alphabet` of length deltas+1 whose adjacent pairs all
/// match their interval, by exhaustive enumeration of the product.
inline std::vector<std::string> words(const TimingModel& m, const std::vector<double>& deltas,
                                      double pct, double coeff, const std::string& alphabet) {
    const std::size_t k = deltas.size() + 1;
    std::vector<std::string> out;
    std::vector<std::size_t> idx(k, 0);
    std::string w(k, ' ');
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) w[i] = alphabet[idx[i]];
        bool ok = true;
        for (std::size_t i = 0; ok && i + 1 < k; ++i) {
            ok = pair_matches(m, w[i], w[i + 1], deltas[i], oracle::tolerance(m, deltas[i], pct, coeff));
        }
        if (ok) out.push_back(w);
        std::size_t pos = k;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < alphabet.size()) break;
            idx[pos] = 0;
            if (pos == 0) {
                std::sort(out.begin(), out.end());
                return out;
            }
        }
    }
}

} // namespace oracle

inline const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyz";

} // namespace keyecho::test
