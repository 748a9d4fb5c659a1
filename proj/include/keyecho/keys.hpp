#pragma once

#include <bitset>
#include <compare>
#include <cstdint>
#include <string>

namespace keyecho {

inline constexpr int kAlphabetSize = 26;

constexpr bool is_letter(char c) noexcept { return c >= 'a' && c <= 'z'; }
constexpr int letter_index(char c) noexcept { return c - 'a'; }
constexpr char letter_at(int index) noexcept { return static_cast<char>('a' + index); }

/// Ordered pair of consecutively typed letters.
struct KeyPair {
    char a{};
    char b{};

    auto operator<=>(const KeyPair&) const = default;

    std::string str() const { return std::string{a, b}; }
};

/// One logged interval between the presses of `pair.a` and `pair.b`.
struct PairObservation {
    KeyPair pair;
    double delta_ms{};

    auto operator<=>(const PairObservation&) const = default;
};

/// Subset of the lowercase alphabet.
class LetterSet {
public:
    LetterSet() = default;

    static LetterSet all() { return LetterSet{std::bitset<kAlphabetSize>{}.set()}; }

    void insert(char c) { bits_.set(letter_index(c)); }
    bool contains(char c) const { return is_letter(c) && bits_.test(letter_index(c)); }
    bool empty() const { return bits_.none(); }
    std::size_t size() const { return bits_.count(); }

    bool operator==(const LetterSet&) const = default;

private:
    explicit LetterSet(std::bitset<kAlphabetSize> bits) : bits_(bits) {}

    std::bitset<kAlphabetSize> bits_;
};

} // namespace keyecho
