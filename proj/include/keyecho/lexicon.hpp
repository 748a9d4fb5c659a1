#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace keyecho {

/// Lowercase word list used to filter candidate words.
class Lexicon {
public:
    /// Normalizes like load_lexicon. Throws EmptyLexicon if nothing survives.
    static Lexicon from_words(std::span<const std::string> words);

    bool contains(std::string_view word) const;

    std::size_t size() const noexcept { return words_.size(); }
    const std::map<std::size_t, std::vector<std::string>>& by_length() const noexcept {
        return by_length_;
    }
    /// Lines rejected for containing non-letters.
    std::size_t dropped() const noexcept { return dropped_; }
    /// SHA-256 (hex) of the source file; empty for in-memory lexicons.
    const std::string& source_hash() const noexcept { return source_hash_; }

private:
    friend Lexicon load_lexicon(const std::filesystem::path& path);

    void add_line(std::string_view line);
    void finish();

    std::unordered_set<std::string> words_;
    std::map<std::size_t, std::vector<std::string>> by_length_;
    std::size_t dropped_{};
    std::string source_hash_;
};

/// One word per line. Entries are trimmed and lowercased; lines with any
/// non-letter are dropped and counted; blank lines are ignored.
Lexicon load_lexicon(const std::filesystem::path& path);

} // namespace keyecho
