#include "loco/hand_log.hpp"

#include "loco/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace loco {
namespace {

using nlohmann::json;

// 17 significant digits: exact round trip for IEEE doubles.
void append_number(std::string& out, double v) { fmt::format_to(std::back_inserter(out), "{:.17g}", v); }

void append_vec(std::string& out, std::string_view key, const Vec3& v) {
    fmt::format_to(std::back_inserter(out), ",\"{}\":[", key);
    append_number(out, v.x);
    out += ',';
    append_number(out, v.y);
    out += ',';
    append_number(out, v.z);
    out += ']';
}

void append_hand(std::string& out, char side, const TrackedHand& hand) {
    const TrackedHand& h = hand.tracked ? hand : TrackedHand::untracked();
    const std::string p(1, side);
    fmt::format_to(std::back_inserter(out), ",\"{}.tracked\":{}", p, hand.tracked ? "true" : "false");
    append_vec(out, p + ".palm", h.palm_centre);
    append_vec(out, p + ".normal", h.palm_normal);
    append_vec(out, p + ".dir", h.pointing_dir);
    for (std::size_t i = 0; i < kFingerCount; ++i) append_vec(out, fmt::format("{}.tip{}", p, i), h.fingertips[i]);
    for (std::size_t i = 0; i < kFingerCount; ++i)
        append_vec(out, fmt::format("{}.vel{}", p, i), h.fingertip_velocities[i]);
}

const json& field(const json& rec, const std::string& key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(line, "missing field '" + key + "'");
    return *it;
}

double read_number(const json& rec, const std::string& key, std::size_t line) {
    const json& v = field(rec, key, line);
    if (!v.is_number()) throw ParseError(line, "field '" + key + "' is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(line, "field '" + key + "' is not finite");
    return d;
}

Vec3 read_vec(const json& rec, const std::string& key, std::size_t line) {
    const json& v = field(rec, key, line);
    if (!v.is_array() || v.size() != 3) throw ParseError(line, "field '" + key + "' must be a 3-element array");
    double c[3];
    for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw ParseError(line, "field '" + key + "' has a non-numeric component");
        c[i] = v[i].get<double>();
        if (!std::isfinite(c[i])) throw ParseError(line, "field '" + key + "' is not finite");
    }
    return {c[0], c[1], c[2]};
}

TrackedHand read_hand(const json& rec, char side, std::size_t line) {
    const std::string p(1, side);
    const json& flag = field(rec, p + ".tracked", line);
    if (!flag.is_boolean()) throw ParseError(line, "field '" + p + ".tracked' is not a boolean");
    TrackedHand h;
    h.tracked = flag.get<bool>();
    h.palm_centre = read_vec(rec, p + ".palm", line);
    h.palm_normal = read_vec(rec, p + ".normal", line);
    h.pointing_dir = read_vec(rec, p + ".dir", line);
    for (std::size_t i = 0; i < kFingerCount; ++i) h.fingertips[i] = read_vec(rec, fmt::format("{}.tip{}", p, i), line);
    for (std::size_t i = 0; i < kFingerCount; ++i)
        h.fingertip_velocities[i] = read_vec(rec, fmt::format("{}.vel{}", p, i), line);
    if (auto problem = validate(h); !problem.empty()) throw ParseError(line, p + " hand: " + problem);
    return h;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

// Shared line loop: decodes each non-blank line as a JSON object, hands it
// to `decode`, and enforces strictly increasing timestamps.
template <class Frame, class Decode>
std::vector<Frame> parse_lines(std::istream& in, Decode decode) {
    std::vector<Frame> frames;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (is_blank(text)) continue;
        json rec;
        try {
            rec = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(line, std::string("malformed record: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(line, "record is not an object");
        Frame f = decode(rec, line);
        if (!frames.empty() && !(f.timestamp > frames.back().timestamp))
            throw ParseError(line, "timestamp is not strictly increasing");
        frames.push_back(std::move(f));
    }
    return frames;
}

} // namespace

std::string format_hand_record(const HandFrame& frame) {
    std::string out = "{\"t\":";
    append_number(out, frame.timestamp);
    append_hand(out, 'l', frame.left);
    append_hand(out, 'r', frame.right);
    out += '}';
    return out;
}

std::vector<HandFrame> parse_hand_log(std::istream& in) {
    return parse_lines<HandFrame>(in, [](const json& rec, std::size_t line) {
        HandFrame f;
        f.timestamp = read_number(rec, "t", line);
        f.left = read_hand(rec, 'l', line);
        f.right = read_hand(rec, 'r', line);
        return f;
    });
}

std::vector<HandFrame> parse_hand_log(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_hand_log(in);
}

void write_hand_log(std::ostream& out, const std::vector<HandFrame>& frames) {
    for (const auto& f : frames) out << format_hand_record(f) << '\n';
}

std::string write_hand_log(const std::vector<HandFrame>& frames) {
    std::ostringstream out;
    write_hand_log(out, frames);
    return out.str();
}

std::vector<GamepadFrame> parse_gamepad_log(std::istream& in) {
    return parse_lines<GamepadFrame>(in, [](const json& rec, std::size_t line) {
        GamepadFrame f;
        f.timestamp = read_number(rec, "t", line);
        f.left_x = read_number(rec, "lx", line);
        f.right_y = read_number(rec, "ry", line);
        if (f.left_x < -1.0 || f.left_x > 1.0) throw ParseError(line, "field 'lx' outside [-1, 1]");
        if (f.right_y < 0.0 || f.right_y > 1.0) throw ParseError(line, "field 'ry' outside [0, 1]");
        return f;
    });
}

std::vector<GamepadFrame> parse_gamepad_log(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_gamepad_log(in);
}

void write_gamepad_log(std::ostream& out, const std::vector<GamepadFrame>& frames) {
    std::string line;
    for (const auto& f : frames) {
        line = "{\"t\":";
        append_number(line, f.timestamp);
        line += ",\"lx\":";
        append_number(line, f.left_x);
        line += ",\"ry\":";
        append_number(line, f.right_y);
        line += "}\n";
        out << line;
    }
}

std::string write_gamepad_log(const std::vector<GamepadFrame>& frames) {
    std::ostringstream out;
    write_gamepad_log(out, frames);
    return out.str();
}

} // namespace loco
