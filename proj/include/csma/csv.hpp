#pragma once

#include <fstream>
#include <string>

namespace csma {

// Locale-independent formatting with 17 significant digits, enough to
// round-trip any double exactly.
std::string format_double(double value);

// Opens a file for writing, throwing with the path in the message.
std::ofstream open_output(const std::string& path);

}  // namespace csma
