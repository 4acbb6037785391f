#pragma once

#include <string>
#include <vector>

namespace rsp {

// Parses either a single number ("90") or an inclusive range
// "start:stop:step". The stop value is emitted when the step divides the
// span; a step of zero or one pointing away from stop is rejected.
std::vector<double> parse_range(const std::string& text);

// Fixed formatting for tabular output: 6 significant digits, '.' decimal
// separator, no locale dependence.
std::string format_g6(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rsp
