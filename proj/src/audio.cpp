#include "keyecho/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "keyecho/error.hpp"

namespace keyecho {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct Format {
    std::uint16_t tag{};
    std::uint16_t channels{};
    std::uint32_t sample_rate{};
    std::uint16_t block_align{};
    std::uint16_t bits{};
};

Format parse_fmt(std::span<const std::uint8_t> chunk) {
    if (chunk.size() < 16) {
        throw Error(ErrorCode::MalformedContainer, "fmt chunk shorter than 16 bytes");
    }
    Format f;
    f.tag = read_u16(chunk, 0);
    f.channels = read_u16(chunk, 2);
    f.sample_rate = read_u32(chunk, 4);
    f.block_align = read_u16(chunk, 12);
    f.bits = read_u16(chunk, 14);
    if (f.tag == kFormatExtensible) {
        // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID,
        // whose first two bytes carry the plain format tag.
        if (chunk.size() < 40) {
            throw Error(ErrorCode::MalformedContainer, "truncated WAVE_FORMAT_EXTENSIBLE header");
        }
        f.tag = read_u16(chunk, 24);
    }
    return f;
}

double decode_sample(std::span<const std::uint8_t> b, std::size_t at, const Format& f) {
    if (f.tag == kFormatFloat) {
        float v;
        std::uint32_t bits = read_u32(b, at);
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::MalformedContainer, "non-finite float sample");
        }
        return std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
    switch (f.bits) {
    case 8:
        return (static_cast<int>(b[at]) - 128) / 128.0;
    case 16:
        return static_cast<std::int16_t>(read_u16(b, at)) / 32768.0;
    case 24: {
        std::int32_t v = b[at] | (b[at + 1] << 8) | (b[at + 2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        return v / 8388608.0;
    }
    default:
        return static_cast<std::int32_t>(read_u32(b, at)) / 2147483648.0;
    }
}

} // namespace

AudioSignal::AudioSignal(std::vector<double> samples, std::uint32_t sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (sample_rate_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
    }
    for (double s : samples_) {
        if (!(s >= -1.0 && s <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "sample outside [-1, 1]");
        }
    }
}

AudioSignal parse_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        throw Error(ErrorCode::MalformedContainer, "missing RIFF/WAVE header");
    }

    std::optional<Format> format;
    std::optional<std::span<const std::uint8_t>> data;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) {
            throw Error(ErrorCode::MalformedContainer,
                        "chunk '" + std::string(reinterpret_cast<const char*>(&bytes[pos]), 4) +
                            "' runs past end of file");
        }
        auto chunk = bytes.subspan(body, size);
        if (tag_is(bytes, pos, "fmt ")) {
            format = parse_fmt(chunk);
        } else if (tag_is(bytes, pos, "data")) {
            data = chunk;
        }
        pos = body + size + (size & 1u);
    }
    if (!format) throw Error(ErrorCode::MalformedContainer, "no fmt chunk");
    if (!data) throw Error(ErrorCode::MalformedContainer, "no data chunk");

    const Format& f = *format;
    if (f.tag != kFormatPcm && f.tag != kFormatFloat) {
        throw Error(ErrorCode::UnsupportedEncoding,
                    "format tag " + std::to_string(f.tag) + " is not PCM or IEEE float");
    }
    const bool bits_ok = f.tag == kFormatFloat
                             ? f.bits == 32
                             : (f.bits == 8 || f.bits == 16 || f.bits == 24 || f.bits == 32);
    if (!bits_ok) {
        throw Error(ErrorCode::UnsupportedEncoding,
                    std::to_string(f.bits) + "-bit samples are not supported");
    }
    if (f.channels != 1 && f.channels != 2) {
        throw Error(ErrorCode::UnsupportedEncoding,
                    std::to_string(f.channels) + " channels (only mono/stereo)");
    }
    if (f.sample_rate == 0) throw Error(ErrorCode::MalformedContainer, "zero sample rate");
    const std::size_t sample_bytes = f.bits / 8;
    if (f.block_align != sample_bytes * f.channels) {
        throw Error(ErrorCode::MalformedContainer, "block align disagrees with channels/bits");
    }

    const std::size_t frames = data->size() / f.block_align;
    if (frames == 0) throw Error(ErrorCode::EmptySignal, "data chunk holds no frames");

    std::vector<double> mono(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = i * f.block_align;
        if (f.channels == 1) {
            mono[i] = decode_sample(*data, at, f);
        } else {
            mono[i] = (decode_sample(*data, at, f) + decode_sample(*data, at + sample_bytes, f)) / 2.0;
        }
    }
    return AudioSignal(std::move(mono), f.sample_rate);
}

AudioSignal load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    try {
        return parse_wav(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

std::vector<std::uint8_t> encode_wav16(const AudioSignal& signal) {
    const auto samples = signal.samples();
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    auto put_tag = [&](const char* tag) { out.insert(out.end(), tag, tag + 4); };
    auto put16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto put32 = [&](std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
    };

    put_tag("RIFF");
    put32(36 + data_bytes);
    put_tag("WAVE");
    put_tag("fmt ");
    put32(16);
    put16(kFormatPcm);
    put16(1);
    put32(signal.sample_rate());
    put32(signal.sample_rate() * 2);
    put16(2);
    put16(16);
    put_tag("data");
    put32(data_bytes);
    for (double s : samples) {
        const long q = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
        put16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
    return out;
}

void write_wav16(const std::filesystem::path& path, const AudioSignal& signal) {
    const auto bytes = encode_wav16(signal);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::size_t ms_to_samples(double ms, std::uint32_t rate) {
    if (!(ms >= 0.0) || rate == 0) {
        throw Error(ErrorCode::InvalidArgument, "ms_to_samples needs ms >= 0 and rate > 0");
    }
    return static_cast<std::size_t>(std::llround(ms * rate / 1000.0));
}

} // namespace keyecho
