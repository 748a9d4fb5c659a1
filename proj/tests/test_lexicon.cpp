#include <doctest.h>

#include <algorithm>

#include "keyecho/error.hpp"
#include "keyecho/eval.hpp"
#include "keyecho/lexicon.hpp"
#include "support.hpp"

using namespace keyecho;
using keyecho::test::TempDir;
using keyecho::test::write_file;

TEST_CASE("load normalizes and drops non-letter entries") {
    TempDir dir;
    write_file(dir / "lex.txt", "Top\r\n  work \n\ncan't\n");
    const auto lex = load_lexicon(dir / "lex.txt");
    CHECK(lex.size() == 2);
    CHECK(lex.dropped() == 1);
    CHECK(lex.contains("top"));
    CHECK(lex.contains("TOP"));
    CHECK(lex.contains("work"));
    CHECK_FALSE(lex.contains("can't"));
    CHECK_FALSE(lex.contains("cant"));
}

TEST_CASE("duplicates collapse") {
    const std::vector<std::string> words{"cat", "Cat", "CAT", "dog"};
    const auto lex = Lexicon::from_words(words);
    CHECK(lex.size() == 2);
    CHECK(lex.by_length().at(3) == std::vector<std::string>{"cat", "dog"});
}

TEST_CASE("empty lexicons are rejected") {
    TempDir dir;
    write_file(dir / "blank.txt", "  \n\n\t\n");
    try {
        load_lexicon(dir / "blank.txt");
        FAIL("expected EmptyLexicon");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyLexicon);
    }
    const std::vector<std::string> junk{"a1", "x-y"};
    CHECK_THROWS_AS(Lexicon::from_words(junk), Error);
}

TEST_CASE("study words grouped by length") {
    const auto words = study_words();
    CHECK(words.size() == 21);
    const auto lex = Lexicon::from_words(words);
    CHECK(lex.size() == 21);
    const auto& four = lex.by_length().at(4);
    CHECK(std::binary_search(four.begin(), four.end(), "work"));
    std::size_t total = 0;
    for (const auto& [len, bucket] : lex.by_length()) {
        CHECK(std::is_sorted(bucket.begin(), bucket.end()));
        for (const auto& w : bucket) CHECK(w.size() == len);
        total += bucket.size();
    }
    CHECK(total == lex.size());
}

TEST_CASE("source hash identifies file content") {
    TempDir dir;
    write_file(dir / "a.txt", "abc\n");
    write_file(dir / "b.txt", "abc\n");
    write_file(dir / "c.txt", "abd\n");
    const auto a = load_lexicon(dir / "a.txt");
    // SHA-256("abc\n")
    CHECK(a.source_hash() == "edeaaff3f1774ad2888673770c6d64097e391bc362d7d6fb34982ddf0efd18cb");
    CHECK(load_lexicon(dir / "b.txt").source_hash() == a.source_hash());
    CHECK(load_lexicon(dir / "c.txt").source_hash() != a.source_hash());
    CHECK(Lexicon::from_words(std::vector<std::string>{"abc"}).source_hash().empty());
}

TEST_CASE("bundled lexicon") {
    const auto lex = load_lexicon(std::filesystem::path(KEYECHO_DATA_DIR) / "lexicon.txt");
    for (const auto& w : study_words()) CHECK(lex.contains(w));
    CHECK(lex.size() == 121);
    CHECK(lex.dropped() == 0);
}

TEST_CASE("missing file is an Io error") {
    try {
        load_lexicon("/nonexistent/words.txt");
        FAIL("expected Io");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}
