#include "keyecho/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "keyecho/error.hpp"

namespace keyecho {

namespace {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string normalize(std::string_view word) {
    std::string out(word);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

void Lexicon::add_line(std::string_view line) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) return;
    auto word = normalize(line);
    if (!std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
        ++dropped_;
        return;
    }
    words_.insert(std::move(word));
}

void Lexicon::finish() {
    if (words_.empty()) throw Error(ErrorCode::EmptyLexicon, "no valid words");
    by_length_.clear();
    for (const auto& w : words_) by_length_[w.size()].push_back(w);
    for (auto& [len, bucket] : by_length_) std::sort(bucket.begin(), bucket.end());
}

Lexicon Lexicon::from_words(std::span<const std::string> words) {
    Lexicon lex;
    for (const auto& w : words) lex.add_line(w);
    lex.finish();
    return lex;
}

bool Lexicon::contains(std::string_view word) const {
    return words_.contains(normalize(word));
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    Lexicon lex;
    std::string_view rest = content;
    if (rest.substr(0, 3) == "\xEF\xBB\xBF") rest.remove_prefix(3);
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        lex.add_line(rest.substr(0, nl));
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    try {
        lex.finish();
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
    lex.source_hash_ = sha256_hex(content);
    return lex;
}

} // namespace keyecho
