#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "coorddet/dataset.hpp"

namespace coorddet {

// Raised on malformed dataset files; `line` is the 1-based offending line.
struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, int line_no);
  int line;
};

// Dataset CSV format:
//   T,M,n,noisy
//   t,i,alpha_1,...,alpha_n,beta_1,...,beta_n
// with t and i 1-based, rows ordered t-major then i, LF line endings, and
// numbers written with 17 significant digits so a write/read round trip
// reproduces every component to 1e-15.
ProbeResponseDataset read_dataset(const std::filesystem::path& path);
void write_dataset(const ProbeResponseDataset& ds, const std::filesystem::path& path);

// Locale-independent "%.17g" rendering used by every numeric artifact.
std::string format_double(double v);

}  // namespace coorddet
