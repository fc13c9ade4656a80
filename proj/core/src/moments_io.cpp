#include "cclab/moments_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cclab {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::map<std::vector<int>, Complex> parse_moment_map(std::istream& in) {
  std::map<std::vector<int>, Complex> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("moment file line " + std::to_string(lineno) + ": missing ':'");
    std::vector<int> tuple;
    {
      std::istringstream ts(line.substr(0, colon));
      std::string tok;
      while (std::getline(ts, tok, ',')) {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        tuple.push_back(v);
      }
    }
    if (tuple.empty())
      throw std::invalid_argument("moment file line " + std::to_string(lineno) + ": empty tuple");
    double re = 0, im = 0;
    {
      std::istringstream vs(line.substr(colon + 1));
      char comma = 0;
      if (!(vs >> re >> comma >> im) || comma != ',')
        throw std::invalid_argument("moment file line " + std::to_string(lineno) +
                                    ": expected 're,im'");
    }
    if (!out.emplace(std::move(tuple), Complex(re, im)).second)
      throw std::invalid_argument("moment file line " + std::to_string(lineno) +
                                  ": duplicate tuple");
  }
  return out;
}

std::map<std::vector<int>, Complex> load_moment_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open moment file: " + path);
  return parse_moment_map(in);
}

std::string format_moment_map(const std::map<std::vector<int>, Complex>& values) {
  std::ostringstream os;
  for (const auto& [tuple, v] : values) {
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) os << ',';
      os << tuple[i];
    }
    os << ": " << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
  }
  return os.str();
}

}  // namespace cclab
