#include "rspsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsp {

namespace {

double parse_double(const std::string& text) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid number \"" + text + "\"");
  }
  if (consumed != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("invalid number \"" + text + "\"");
  }
  return v;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::string piece;
  std::istringstream in(text);
  while (std::getline(in, piece, ':')) {
    parts.push_back(piece);
  }
  if (parts.size() == 1) {
    return {parse_double(parts[0])};
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("range must be a number or start:stop:step, got \"" + text + "\"");
  }
  const double start = parse_double(parts[0]);
  const double stop = parse_double(parts[1]);
  const double step = parse_double(parts[2]);
  if (step == 0.0) {
    throw std::invalid_argument("range step must be nonzero");
  }
  const double span = (stop - start) / step;
  if (span < 0.0) {
    throw std::invalid_argument("range step points away from stop");
  }
  // The epsilon keeps the stop end inclusive when the step divides the span
  // exactly up to floating-point rounding.
  const long long count = static_cast<long long>(std::floor(span + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count) + 1);
  for (long long i = 0; i <= count; ++i) {
    out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open \"" + path + "\" for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw std::runtime_error("read failure on \"" + path + "\"");
  }
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open \"" + path + "\" for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw std::runtime_error("write failure on \"" + path + "\"");
  }
}

}  // namespace rsp
