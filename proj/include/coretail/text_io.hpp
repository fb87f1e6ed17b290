#pragma once

#include <string>
#include <vector>

#include "coretail/errors.hpp"

namespace coretail {

// Shared input format: one value per line, '#' comment lines and blank lines
// ignored. Throws IoError on unreadable files and ParseError (with the line
// number) on malformed content.
std::vector<double> read_value_file(const std::string& path);
std::vector<long> read_degree_file(const std::string& path);

}  // namespace coretail
