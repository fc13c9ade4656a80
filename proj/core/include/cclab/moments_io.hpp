#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cclab/cumulants.hpp"

namespace cclab {

/// Text map from index tuples to complex values, one entry per line:
///   i1,i2,...: re,im
/// Blank lines and lines starting with '#' are ignored.
std::map<std::vector<int>, Complex> parse_moment_map(std::istream& in);
std::map<std::vector<int>, Complex> load_moment_map(const std::string& path);

/// Serializes in the same format, tuples in lexicographic order, floats at
/// 17 significant digits so round-trips are exact.
std::string format_moment_map(const std::map<std::vector<int>, Complex>& values);

}  // namespace cclab
