#include "coretail/text_io.hpp"

#include <charconv>
#include <fstream>
#include <string>

namespace coretail {

namespace {

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string trimmed(const std::string& line) {
  const auto b = line.find_first_not_of(" \t\r\n");
  const auto e = line.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : line.substr(b, e - b + 1);
}

template <class T, class Parse>
std::vector<T> read_lines(const std::string& path, Parse&& parse) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<T> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const std::string tok = trimmed(line);
    T value;
    if (!parse(tok, value))
      throw ParseError("cannot parse '" + tok + "' in " + path, line_no);
    out.push_back(value);
  }
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return out;
}

}  // namespace

std::vector<double> read_value_file(const std::string& path) {
  return read_lines<double>(path, [](const std::string& tok, double& v) {
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      return used == tok.size();
    } catch (...) {
      return false;
    }
  });
}

std::vector<long> read_degree_file(const std::string& path) {
  return read_lines<long>(path, [](const std::string& tok, long& v) {
    const auto [ptr, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), v);
    return ec == std::errc() && ptr == tok.data() + tok.size();
  });
}

}  // namespace coretail
