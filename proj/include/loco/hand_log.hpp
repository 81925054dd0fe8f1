#pragma once

// Line-delimited hand and gamepad logs. Each line is a flat JSON object:
//
//   {"t":0.01,"l.tracked":true,"l.palm":[x,y,z],"l.normal":[..],"l.dir":[..],
//    "l.tip0":[..] .. "l.tip4":[..],"l.vel0":[..] .. "l.vel4":[..], "r.…": …}
//
//   {"t":0.01,"lx":-0.25,"ry":0.8}
//
// Numbers are written in shortest round-trip form, so parse(write(x)) == x.

#include "loco/hand.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace loco {

std::vector<HandFrame> parse_hand_log(std::istream& in);
std::vector<HandFrame> parse_hand_log(std::string_view text);
void write_hand_log(std::ostream& out, const std::vector<HandFrame>& frames);
std::string write_hand_log(const std::vector<HandFrame>& frames);

/// One record, without the trailing newline.
std::string format_hand_record(const HandFrame& frame);

std::vector<GamepadFrame> parse_gamepad_log(std::istream& in);
std::vector<GamepadFrame> parse_gamepad_log(std::string_view text);
void write_gamepad_log(std::ostream& out, const std::vector<GamepadFrame>& frames);
std::string write_gamepad_log(const std::vector<GamepadFrame>& frames);

} // namespace loco
