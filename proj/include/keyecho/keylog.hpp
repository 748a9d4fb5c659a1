#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "keyecho/keys.hpp"

namespace keyecho {

/// A key label: a lowercase letter or one of the reserved non-letter labels.
class Key {
public:
    enum class Kind { Letter, Space, Enter, Other };

    static Key letter(char c);
    static Key space() { return Key{Kind::Space, 0}; }
    static Key enter() { return Key{Kind::Enter, 0}; }
    static Key other() { return Key{Kind::Other, 0}; }

    /// Canonicalizes a textual label: single letters of either case map to
    /// that letter, SPACE/ENTER (case-insensitive, RETURN as an alias) to the
    /// reserved labels, anything else to OTHER.
    static Key from_label(std::string_view label);

    /// Windows virtual-key code (0x41..0x5A letters, 0x20 space, 0x0D enter).
    static Key from_virtual_code(int code);

    /// PC/AT set-1 scan code.
    static Key from_scan_code(int code);

    Kind kind() const noexcept { return kind_; }
    bool is_letter() const noexcept { return kind_ == Kind::Letter; }
    char letter() const noexcept { return letter_; }

    /// "a".."z", "SPACE", "ENTER" or "OTHER".
    std::string label() const;

    bool operator==(const Key&) const = default;

private:
    Key(Kind kind, char letter) : kind_(kind), letter_(letter) {}

    Kind kind_;
    char letter_;
};

struct KeystrokeEvent {
    Key key = Key::other();
    double press_ms{};
    double release_ms{};
    int virtual_code{};
    int scan_code{};
    bool caps{};
    bool shift{};
};

struct TypingSession {
    std::string session_id;
    std::vector<KeystrokeEvent> events;  // ascending press_ms
};

/// Column order of the keylog CSV. Files may carry any prefix of at least the
/// first three columns; rows must match the header's column count.
inline constexpr std::string_view kKeylogHeader =
    "key,press_ms,release_ms,virtual_code,scan_code,caps,shift";

/// Parses a keylog CSV. Rows are stably sorted by press time. The key column
/// wins when non-empty; otherwise the virtual code, then the scan code, picks
/// the label. Time columns accept plain milliseconds or a .NET TimeSpan
/// ("[d.]hh:mm:ss[.fffffff]") as written by the original capture tool.
TypingSession parse_keylog(const std::filesystem::path& path);
TypingSession parse_keylog(std::istream& in, std::string session_id);

void write_keylog(std::ostream& out, const TypingSession& session);
void write_keylog(const std::filesystem::path& path, const TypingSession& session);

/// Milliseconds from a TimeSpan string or a plain decimal number.
double parse_time_ms(std::string_view text);

/// Press-time differences of adjacent letter events. A non-letter event in
/// between breaks adjacency; pairs with a non-positive gap are dropped.
std::vector<PairObservation> session_to_pairs(const TypingSession& session);

} // namespace keyecho
