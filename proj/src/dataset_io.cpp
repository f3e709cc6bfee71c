#include "coorddet/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace coorddet {

parse_error::parse_error(const std::string& msg, int line_no)
    : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"),
      line(line_no) {}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& field, int line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw parse_error("non-numeric field '" + field + "'", line_no);
  return v;
}

int parse_int(const std::string& field, int line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw parse_error("non-integer field '" + field + "'", line_no);
  return static_cast<int>(v);
}

}  // namespace

ProbeResponseDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path.string() + "'", 0);

  std::string line;
  if (!std::getline(in, line)) throw parse_error("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  if (header.size() != 4)
    throw parse_error("header must be 'T,M,n,noisy'", 1);
  ProbeResponseDataset ds;
  ds.T = parse_int(header[0], 1);
  ds.M = parse_int(header[1], 1);
  ds.n = parse_int(header[2], 1);
  const int noisy_flag = parse_int(header[3], 1);
  if (ds.T < 1 || ds.M < 1 || ds.n < 1)
    throw parse_error("header requires T, M, n >= 1", 1);
  if (noisy_flag != 0 && noisy_flag != 1)
    throw parse_error("noisy flag must be 0 or 1", 1);
  ds.noisy = noisy_flag == 1;

  ds.probes.assign(ds.T, Probe::Zero(ds.n));
  ds.responses.assign(ds.T, std::vector<Response>(ds.M, Response::Zero(ds.n)));

  const std::size_t expect_fields = 2 + 2 * static_cast<std::size_t>(ds.n);
  int line_no = 1;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // Tolerate a single trailing newline, nothing else.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw parse_error("blank line inside data", line_no);
    }
    if (rows >= ds.T * ds.M)
      throw parse_error("more data rows than T*M", line_no);
    auto fields = split_csv(line);
    if (fields.size() != expect_fields)
      throw parse_error("expected " + std::to_string(expect_fields) +
                            " fields, got " + std::to_string(fields.size()),
                        line_no);
    const int t = parse_int(fields[0], line_no);
    const int i = parse_int(fields[1], line_no);
    const int want_t = rows / ds.M + 1;
    const int want_i = rows % ds.M + 1;
    if (t != want_t || i != want_i)
      throw parse_error("rows must be ordered t-major then i; expected t=" +
                            std::to_string(want_t) + ",i=" + std::to_string(want_i),
                        line_no);
    Probe alpha(ds.n);
    for (int c = 0; c < ds.n; ++c)
      alpha(c) = parse_number(fields[2 + c], line_no);
    if (i == 1) {
      ds.probes[t - 1] = alpha;
    } else if ((ds.probes[t - 1] - alpha).cwiseAbs().maxCoeff() != 0.0) {
      throw parse_error("probe columns disagree across agents of one t", line_no);
    }
    for (int c = 0; c < ds.n; ++c)
      ds.responses[t - 1][i - 1](c) = parse_number(fields[2 + ds.n + c], line_no);
    ++rows;
  }
  if (rows != ds.T * ds.M)
    throw parse_error("row count " + std::to_string(rows) +
                          " does not equal T*M = " + std::to_string(ds.T * ds.M),
                      line_no + 1);
  return ds;
}

void write_dataset(const ProbeResponseDataset& ds, const std::filesystem::path& path) {
  std::ostringstream out;
  out << ds.T << ',' << ds.M << ',' << ds.n << ',' << (ds.noisy ? 1 : 0) << '\n';
  for (int t = 0; t < ds.T; ++t) {
    for (int i = 0; i < ds.M; ++i) {
      out << (t + 1) << ',' << (i + 1);
      for (int c = 0; c < ds.n; ++c) out << ',' << format_double(ds.probes[t](c));
      for (int c = 0; c < ds.n; ++c)
        out << ',' << format_double(ds.responses[t][i](c));
      out << '\n';
    }
  }
  std::ofstream f(path, std::ios::binary);  // binary: LF endings everywhere
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << out.str();
}

}  // namespace coorddet
