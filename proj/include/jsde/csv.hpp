// SPDX-License-Identifier: MIT
#pragma once
//
// Text output helpers shared by the CLI and tests. Numbers use the shortest
// decimal form that round-trips (std::to_chars), the decimal separator is
// always ".", and lines end with LF, so identical runs produce identical
// bytes on every locale and platform.

#include <stdexcept>
#include <string>
#include <vector>

namespace jsde {

// File-system failure while reading or writing an artifact.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation. Infinities format as "inf" /
// "-inf" and NaN as "nan".
std::string format_double(double v);

// Comma-joined cells with a trailing LF.
std::string csv_line(const std::vector<std::string>& cells);

// Writes content to path, creating parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

// Reads a whole file into a string.
std::string read_text_file(const std::string& path);

}  // namespace jsde
