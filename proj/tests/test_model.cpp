#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "keyecho/error.hpp"
#include "keyecho/model.hpp"
#include "support.hpp"

using namespace keyecho;
namespace oracle = keyecho::test::oracle;
using nlohmann::json;

namespace {

std::vector<PairObservation> hand_example() {
    return {{{'t', 'o'}, 300}, {{'t', 'o'}, 310}, {{'o', 'p'}, 400}};
}

std::vector<PairObservation> random_observations(std::mt19937_64& rng, std::size_t n, std::size_t letters) {
    std::uniform_int_distribution<int> letter(0, static_cast<int>(letters) - 1);
    std::uniform_real_distribution<double> delta(120.0, 900.0);
    std::vector<PairObservation> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({{letter_at(letter(rng)), letter_at(letter(rng))}, delta(rng)});
    }
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("train computes mean, sample std and ASD") {
    const auto m = train(hand_example());
    REQUIRE(m.stats().size() == 2);
    const auto* to = m.find({'t', 'o'});
    REQUIRE(to != nullptr);
    CHECK(to->mean_ms == 305.0);
    CHECK(to->std_ms == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
    CHECK(to->count == 2);
    const auto* op = m.find({'o', 'p'});
    CHECK(op->mean_ms == 400.0);
    CHECK(op->std_ms == 0.0);
    CHECK(op->count == 1);
    CHECK(m.asd_ms() == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
}

TEST_CASE("train edge cases") {
    const auto empty = train({});
    CHECK(empty.stats().empty());
    CHECK(empty.asd_ms() == 0.0);

    const std::vector<PairObservation> one{{{'a', 'b'}, 200}};
    const auto single = train(one);
    CHECK(single.find({'a', 'b'})->mean_ms == 200.0);
    CHECK(single.find({'a', 'b'})->std_ms == 0.0);
    CHECK(single.asd_ms() == 0.0);

    const std::vector<PairObservation> bad{{{'a', 'b'}, 0.0}};
    CHECK(code_of([&] { train(bad); }) == ErrorCode::NonPositiveDelta);
}

TEST_CASE("train is order invariant") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        auto obs = random_observations(rng, 200, 5);
        const auto a = train(obs);
        std::shuffle(obs.begin(), obs.end(), rng);
        CHECK(train(obs) == a);
    }
}

TEST_CASE("train scales with the data") {
    std::mt19937_64 rng(13);
    auto obs = random_observations(rng, 300, 4);
    const auto base = train(obs);
    for (double c : {2.0, 0.5, 3.0}) {
        auto scaled = obs;
        for (auto& o : scaled) o.delta_ms *= c;
        const auto m = train(scaled);
        const bool exact = c == 2.0 || c == 0.5;
        for (const auto& [pair, st] : base.stats()) {
            const auto* s = m.find(pair);
            if (exact) {
                CHECK(s->mean_ms == c * st.mean_ms);
                CHECK(s->std_ms == c * st.std_ms);
            } else {
                CHECK(s->mean_ms == doctest::Approx(c * st.mean_ms).epsilon(1e-12));
                CHECK(s->std_ms == doctest::Approx(c * st.std_ms).epsilon(1e-12));
            }
        }
        if (exact) {
            CHECK(m.asd_ms() == c * base.asd_ms());
        } else {
            CHECK(m.asd_ms() == doctest::Approx(c * base.asd_ms()).epsilon(1e-12));
        }
    }
}

TEST_CASE("tolerance") {
    const auto m = train(hand_example());
    CHECK(tolerance(m, 300, 0.05, 0.0) == 15.0);
    CHECK(tolerance(m, 300, 0.05, 1.0) == doctest::Approx(22.07).epsilon(1e-4));
    CHECK(tolerance(m, 123, 0.0, 0.0) == 0.0);
    CHECK(code_of([&] { tolerance(m, 0, 0.05, 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { tolerance(m, 10, -0.05, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("candidates") {
    const std::vector<PairObservation> obs{{{'t', 'o'}, 305}, {{'b', 'o'}, 500}};
    const auto m = train(obs);
    const auto c = candidates(m, 300, 10, LetterSet::all());
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Candidate{{'t', 'o'}, 305});
    CHECK(c == oracle::candidates(m, 300, 10, keyecho::test::kAlphabet));

    CHECK(candidates(m, 300, 1e6, LetterSet::all()).size() == 2);
    CHECK(candidates(m, 300, 1e6, LetterSet{}).empty());

    LetterSet only_b;
    only_b.insert('b');
    const auto just_b = candidates(m, 300, 1e6, only_b);
    REQUIRE(just_b.size() == 1);
    CHECK(just_b[0].pair == KeyPair{'b', 'o'});
}

TEST_CASE("candidates agree with a brute-force scan") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = train(random_observations(rng, 60, 26));
        const double delta = std::uniform_real_distribution<double>(100.0, 950.0)(rng);
        const double t_f = std::uniform_real_distribution<double>(0.0, 80.0)(rng);
        std::string allowed;
        LetterSet set;
        for (char c = 'a'; c <= 'z'; ++c) {
            if (rng() % 3 != 0) {
                allowed.push_back(c);
                set.insert(c);
            }
        }
        REQUIRE(candidates(m, delta, t_f, set) == oracle::candidates(m, delta, t_f, allowed));
    }
}

TEST_CASE("save/load round trip") {
    keyecho::test::TempDir dir;
    std::mt19937_64 rng(31);
    const auto m = train(random_observations(rng, 150, 6));
    save_model(m, dir / "m.json");
    CHECK(load_model(dir / "m.json") == m);

    save_model(train({}), dir / "empty.json");
    const auto empty = load_model(dir / "empty.json");
    CHECK(empty.stats().empty());
    CHECK(empty.observations().empty());
}

TEST_CASE("load rejects tampered and malformed files") {
    keyecho::test::TempDir dir;
    auto doc = model_to_json(train(hand_example()));

    auto tampered = doc;
    for (auto& row : tampered["analysis"]) {
        if (row["a"] == "t") row["mean_ms"] = 999.0;
    }
    keyecho::test::write_file(dir / "tampered.json", tampered.dump());
    CHECK(code_of([&] { load_model(dir / "tampered.json"); }) == ErrorCode::ConsistencyFailure);

    auto wrong_asd = doc;
    wrong_asd["asd_ms"] = 1.0;
    CHECK(code_of([&] { model_from_json(wrong_asd); }) == ErrorCode::ConsistencyFailure);

    auto extra_row = doc;
    extra_row["analysis"].push_back({{"a", "x"}, {"b", "y"}, {"mean_ms", 1.0}, {"std_ms", 0.0}, {"count", 1}});
    CHECK(code_of([&] { model_from_json(extra_row); }) == ErrorCode::ConsistencyFailure);

    auto no_version = doc;
    no_version.erase("version");
    CHECK(code_of([&] { model_from_json(no_version); }) == ErrorCode::SchemaMismatch);

    auto future = doc;
    future["version"] = 2;
    CHECK(code_of([&] { model_from_json(future); }) == ErrorCode::SchemaMismatch);

    auto bad_letter = doc;
    bad_letter["observations"][0]["a"] = "T";
    CHECK(code_of([&] { model_from_json(bad_letter); }) == ErrorCode::SchemaMismatch);

    keyecho::test::write_file(dir / "junk.json", "{not json");
    CHECK(code_of([&] { load_model(dir / "junk.json"); }) == ErrorCode::SchemaMismatch);
    CHECK(code_of([&] { load_model(dir / "missing.json"); }) == ErrorCode::Io);
}
