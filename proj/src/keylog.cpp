#include "keyecho/keylog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "keyecho/error.hpp"

namespace keyecho {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view text) {
    double value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw Error(ErrorCode::MalformedRow, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

int parse_code(std::string_view text) {
    if (text.empty()) return 0;
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
        base = 16;
    }
    int value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::MalformedRow, "bad key code '" + std::string(text) + "'");
    }
    return value;
}

bool parse_flag(std::string_view text) {
    const auto v = lower(text);
    if (v.empty() || v == "0" || v == "false" || v == "off") return false;
    if (v == "1" || v == "true" || v == "on") return true;
    throw Error(ErrorCode::MalformedRow, "bad flag '" + std::string(text) + "'");
}

constexpr std::string_view kColumns[] = {"key",       "press_ms", "release_ms", "virtual_code",
                                         "scan_code", "caps",     "shift"};

// PC/AT set-1 make codes for the three letter rows.
constexpr std::string_view kScanRowQ = "qwertyuiop";  // 0x10..0x19
constexpr std::string_view kScanRowA = "asdfghjkl";   // 0x1E..0x26
constexpr std::string_view kScanRowZ = "zxcvbnm";     // 0x2C..0x32

} // namespace

Key Key::letter(char c) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!keyecho::is_letter(l)) throw Error(ErrorCode::InvalidArgument, std::string("not a letter: ") + c);
    return Key{Kind::Letter, l};
}

Key Key::from_label(std::string_view label) {
    label = trim(label);
    if (label.size() == 1 && std::isalpha(static_cast<unsigned char>(label[0]))) {
        return letter(label[0]);
    }
    const auto l = lower(label);
    if (l == "space" || label == " ") return space();
    if (l == "enter" || l == "return") return enter();
    return other();
}

Key Key::from_virtual_code(int code) {
    if (code >= 0x41 && code <= 0x5A) return letter(static_cast<char>('a' + (code - 0x41)));
    if (code == 0x20) return space();
    if (code == 0x0D) return enter();
    return other();
}

Key Key::from_scan_code(int code) {
    if (code >= 0x10 && code < 0x10 + static_cast<int>(kScanRowQ.size())) return letter(kScanRowQ[code - 0x10]);
    if (code >= 0x1E && code < 0x1E + static_cast<int>(kScanRowA.size())) return letter(kScanRowA[code - 0x1E]);
    if (code >= 0x2C && code < 0x2C + static_cast<int>(kScanRowZ.size())) return letter(kScanRowZ[code - 0x2C]);
    if (code == 0x39) return space();
    if (code == 0x1C) return enter();
    return other();
}

std::string Key::label() const {
    switch (kind_) {
    case Kind::Letter: return std::string(1, letter_);
    case Kind::Space: return "SPACE";
    case Kind::Enter: return "ENTER";
    case Kind::Other: break;
    }
    return "OTHER";
}

double parse_time_ms(std::string_view text) {
    text = trim(text);
    if (text.find(':') == std::string_view::npos) return parse_number(text);

    // [-][d.]hh:mm:ss[.fffffff]
    const auto first_colon = text.find(':');
    auto head = text.substr(0, first_colon);
    double days = 0;
    if (const auto dot = head.find('.'); dot != std::string_view::npos) {
        days = parse_number(head.substr(0, dot));
        head = head.substr(dot + 1);
    }
    const auto rest = text.substr(first_colon + 1);
    const auto second_colon = rest.find(':');
    if (second_colon == std::string_view::npos) {
        throw Error(ErrorCode::MalformedRow, "bad TimeSpan '" + std::string(text) + "'");
    }
    const double hours = parse_number(head);
    const double minutes = parse_number(rest.substr(0, second_colon));
    const double seconds = parse_number(rest.substr(second_colon + 1));
    return (((days * 24 + hours) * 60 + minutes) * 60 + seconds) * 1000.0;
}

TypingSession parse_keylog(std::istream& in, std::string session_id) {
    TypingSession session{std::move(session_id), {}};
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;

    auto fail = [&](const std::string& what) -> Error {
        return Error(ErrorCode::MalformedRow, session.session_id + ":" + std::to_string(line_no) +
                                                  ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (trim(view).empty()) continue;
        const auto fields = split_commas(view);

        if (columns == 0) {
            if (fields.size() < 3 || fields.size() > std::size(kColumns)) {
                throw fail("header must list key,press_ms,release_ms[,...]");
            }
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (lower(fields[c]) != kColumns[c]) {
                    throw fail("unexpected header column '" + std::string(fields[c]) + "'");
                }
            }
            columns = fields.size();
            continue;
        }

        if (fields.size() != columns) {
            throw fail("expected " + std::to_string(columns) + " columns, got " +
                       std::to_string(fields.size()));
        }
        KeystrokeEvent ev;
        try {
            ev.press_ms = parse_time_ms(fields[1]);
            ev.release_ms = parse_time_ms(fields[2]);
            if (columns > 3) ev.virtual_code = parse_code(fields[3]);
            if (columns > 4) ev.scan_code = parse_code(fields[4]);
            if (columns > 5) ev.caps = parse_flag(fields[5]);
            if (columns > 6) ev.shift = parse_flag(fields[6]);
        } catch (const Error& e) {
            throw fail(e.detail());
        }
        if (!(ev.press_ms >= 0.0)) throw fail("press_ms must be >= 0");
        if (!(ev.release_ms >= ev.press_ms)) throw fail("release_ms precedes press_ms");

        if (!fields[0].empty()) {
            ev.key = Key::from_label(fields[0]);
        } else if (ev.virtual_code != 0) {
            ev.key = Key::from_virtual_code(ev.virtual_code);
        } else {
            ev.key = Key::from_scan_code(ev.scan_code);
        }
        session.events.push_back(ev);
    }
    if (columns == 0) {
        line_no = 1;
        throw fail("missing header row");
    }

    std::stable_sort(session.events.begin(), session.events.end(),
                     [](const KeystrokeEvent& x, const KeystrokeEvent& y) {
                         return x.press_ms < y.press_ms;
                     });
    return session;
}

TypingSession parse_keylog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_keylog(in, path.string());
}

void write_keylog(std::ostream& out, const TypingSession& session) {
    out << kKeylogHeader << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& ev : session.events) {
        out << ev.key.label() << ',' << ev.press_ms << ',' << ev.release_ms << ','
            << ev.virtual_code << ',' << ev.scan_code << ',' << (ev.caps ? 1 : 0) << ','
            << (ev.shift ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

void write_keylog(const std::filesystem::path& path, const TypingSession& session) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_keylog(out, session);
}

std::vector<PairObservation> session_to_pairs(const TypingSession& session) {
    std::vector<PairObservation> pairs;
    for (std::size_t i = 1; i < session.events.size(); ++i) {
        const auto& prev = session.events[i - 1];
        const auto& cur = session.events[i];
        if (!prev.key.is_letter() || !cur.key.is_letter()) continue;
        const double delta = cur.press_ms - prev.press_ms;
        if (delta <= 0.0) continue;
        pairs.push_back({{prev.key.letter(), cur.key.letter()}, delta});
    }
    return pairs;
}

} // namespace keyecho
