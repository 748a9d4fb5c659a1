#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "keyecho/audio.hpp"
#include "keyecho/error.hpp"
#include "support.hpp"

using namespace keyecho;
using keyecho::test::Bytes;
using keyecho::test::make_wav;

namespace {

std::vector<std::uint8_t> pcm16(std::initializer_list<std::int16_t> values) {
    Bytes b;
    for (auto v : values) b.i16(v);
    return b.data;
}

ErrorCode code_of(const std::vector<std::uint8_t>& bytes) {
    try {
        parse_wav(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("16-bit mono is scaled by 32768") {
    const auto sig = parse_wav(make_wav(1, 1, 44100, 16, pcm16({0, 16384, -32768})));
    CHECK(sig.sample_rate() == 44100);
    REQUIRE(sig.size() == 3);
    CHECK(sig.samples()[0] == 0.0);
    CHECK(sig.samples()[1] == 0.5);
    CHECK(sig.samples()[2] == -1.0);
}

TEST_CASE("stereo is averaged to mono") {
    const auto sig = parse_wav(make_wav(1, 2, 8000, 16, pcm16({1000, 3000})));
    REQUIRE(sig.size() == 1);
    CHECK(sig.samples()[0] == 0.06103515625);

    const auto swapped = parse_wav(make_wav(1, 2, 8000, 16, pcm16({3000, 1000})));
    CHECK(swapped.samples()[0] == sig.samples()[0]);
}

TEST_CASE("channel order does not matter for random stereo content") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> dist(-32768, 32767);
    Bytes lr, rl;
    for (int i = 0; i < 500; ++i) {
        const auto l = static_cast<std::int16_t>(dist(rng));
        const auto r = static_cast<std::int16_t>(dist(rng));
        lr.i16(l).i16(r);
        rl.i16(r).i16(l);
    }
    const auto a = parse_wav(make_wav(1, 2, 8000, 16, lr.data));
    const auto b = parse_wav(make_wav(1, 2, 8000, 16, rl.data));
    CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin(), b.samples().end()));
}

TEST_CASE("other integer widths and float") {
    SUBCASE("8-bit unsigned") {
        const auto sig = parse_wav(make_wav(1, 1, 8000, 8, {128, 0, 192}));
        CHECK(sig.samples()[0] == 0.0);
        CHECK(sig.samples()[1] == -1.0);
        CHECK(sig.samples()[2] == 0.5);
    }
    SUBCASE("24-bit") {
        // 0x400000 = 0.5, 0x800000 = -1
        const auto sig = parse_wav(make_wav(1, 1, 8000, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0x80}));
        CHECK(sig.samples()[0] == 0.5);
        CHECK(sig.samples()[1] == -1.0);
    }
    SUBCASE("32-bit") {
        Bytes b;
        b.u32(0x80000000u).u32(0x40000000u);
        const auto sig = parse_wav(make_wav(1, 1, 8000, 32, b.data));
        CHECK(sig.samples()[0] == -1.0);
        CHECK(sig.samples()[1] == 0.5);
    }
    SUBCASE("32-bit float, out-of-range values clamp") {
        Bytes b;
        auto put = [&](float f) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            b.u32(u);
        };
        put(0.25f);
        put(-2.0f);
        const auto sig = parse_wav(make_wav(3, 1, 8000, 32, b.data));
        CHECK(sig.samples()[0] == 0.25);
        CHECK(sig.samples()[1] == -1.0);
    }
    SUBCASE("extensible wrapper around PCM") {
        const auto sig = parse_wav(make_wav(1, 1, 8000, 16, pcm16({16384}), true));
        CHECK(sig.samples()[0] == 0.5);
    }
}

TEST_CASE("unknown chunks are skipped, odd sizes padded") {
    Bytes b;
    b.tag("RIFF").u32(0).tag("WAVE");
    b.tag("LIST").u32(3).raw({1, 2, 3, 0});
    b.tag("fmt ").u32(16).u16(1).u16(1).u32(8000).u32(16000).u16(2).u16(16);
    b.tag("data").u32(2).i16(-16384);
    const auto sig = parse_wav(b.data);
    CHECK(sig.samples()[0] == -0.5);
}

TEST_CASE("container errors") {
    CHECK(code_of({'R', 'I', 'F', 'F'}) == ErrorCode::MalformedContainer);
    // data chunk claims 100 bytes but carries 4
    CHECK(code_of(make_wav(1, 1, 8000, 16, pcm16({1, 2}), false, 100)) == ErrorCode::MalformedContainer);
    CHECK(code_of(make_wav(2, 1, 8000, 4, {0, 0})) == ErrorCode::UnsupportedEncoding);  // MS ADPCM
    CHECK(code_of(make_wav(3, 1, 8000, 64, std::vector<std::uint8_t>(8))) == ErrorCode::UnsupportedEncoding);
    CHECK(code_of(make_wav(1, 3, 8000, 16, pcm16({1, 2, 3}))) == ErrorCode::UnsupportedEncoding);
    CHECK(code_of(make_wav(1, 1, 8000, 16, {})) == ErrorCode::EmptySignal);

    Bytes no_data;
    no_data.tag("RIFF").u32(28).tag("WAVE").tag("fmt ").u32(16).u16(1).u16(1).u32(8000).u32(16000).u16(2).u16(16);
    CHECK(code_of(no_data.data) == ErrorCode::MalformedContainer);
}

TEST_CASE("load_wav reports missing files as Io") {
    try {
        load_wav("/nonexistent/keyecho.wav");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("16-bit write then load is bit-exact") {
    keyecho::test::TempDir dir;
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> dist(-32768, 32767);
    for (int round = 0; round < 20; ++round) {
        Bytes b;
        const int n = 1 + round * 37;
        for (int i = 0; i < n; ++i) b.i16(static_cast<std::int16_t>(dist(rng)));
        const auto original = parse_wav(make_wav(1, 1, 22050, 16, b.data));
        write_wav16(dir / "rt.wav", original);
        const auto back = load_wav(dir / "rt.wav");
        CHECK(back.sample_rate() == 22050);
        CHECK(std::equal(original.samples().begin(), original.samples().end(), back.samples().begin(),
                         back.samples().end()));
    }
}

TEST_CASE("AudioSignal invariants") {
    CHECK_THROWS_AS(AudioSignal({0.0, 1.5}, 8000), Error);
    CHECK_THROWS_AS(AudioSignal({0.0}, 0), Error);
    const AudioSignal sig(std::vector<double>(22050, 0.0), 44100);
    CHECK(sig.duration_seconds() == 0.5);
}

TEST_CASE("ms_to_samples") {
    CHECK(ms_to_samples(100, 44100) == 4410);
    CHECK(ms_to_samples(0, 44100) == 0);
    CHECK(ms_to_samples(0, 8000) == 0);
    CHECK(ms_to_samples(100, 1000) == 100);
    CHECK_THROWS_AS(ms_to_samples(-1, 1000), Error);
}
