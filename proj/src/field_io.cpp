#include "acs/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "acs/errors.hpp"

namespace acs {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse_error, std::string("bad ") + what + " value '" + s + "'");
  }
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size() || v < 0 || v > (1L << 30)) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse_error, std::string("bad ") + what + " value '" + s + "'");
  }
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

std::string temp_sibling(const std::string& path) {
  return path + ".tmp" + std::to_string(static_cast<unsigned long>(std::hash<std::string>{}(path) & 0xffffu));
}

void commit(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::invalid_input, "cannot move output into place: " + path);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_header(const Grid& grid) {
  std::ostringstream os;
  os << "ACSFIELD v1 m=" << grid.dim() << " extents=";
  for (int a = 0; a < grid.dim(); ++a) os << (a ? "," : "") << grid.extent(a);
  os << " h=" << format_double(grid.spacing()) << " origin=";
  for (int a = 0; a < grid.dim(); ++a) os << (a ? "," : "") << format_double(grid.origin()[a]);
  os << " boundary=" << to_string(grid.boundary());
  return os.str();
}

Grid parse_field_header(const std::string& line) {
  const auto tokens = split(line, ' ');
  if (tokens.size() != 7 || tokens[0] != "ACSFIELD" || tokens[1] != "v1") {
    throw Error(ErrorKind::parse_error, "not an ACSFIELD v1 header");
  }
  std::map<std::string, std::string> kv;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::parse_error, "malformed header token '" + tokens[i] + "'");
    kv[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
  }
  for (const char* key : {"m", "extents", "h", "origin", "boundary"}) {
    if (!kv.count(key)) throw Error(ErrorKind::parse_error, std::string("header lacks ") + key);
  }
  const int m = parse_int(kv["m"], "m");
  std::vector<int> extents;
  for (const auto& s : split(kv["extents"], ',')) extents.push_back(parse_int(s, "extents"));
  std::vector<double> origin;
  for (const auto& s : split(kv["origin"], ',')) origin.push_back(parse_number(s, "origin"));
  const double h = parse_number(kv["h"], "h");
  Boundary b;
  try {
    b = parse_boundary(kv["boundary"]);
  } catch (const Error& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
  try {
    return Grid(m, extents, h, origin, b);
  } catch (const Error& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

void write_field(std::ostream& out, const MatrixField& field) {
  out << field_header(field.grid()) << '\n';
  const auto& v = field.values();
  std::vector<std::uint64_t> buf(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = to_little_endian(std::bit_cast<std::uint64_t>(v[i]));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (!out) throw Error(ErrorKind::invalid_input, "failed writing field data");
}

MatrixField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, "empty field file");
  const Grid grid = parse_field_header(line);
  const std::size_t count = grid.size() * grid.dim() * grid.dim();
  std::vector<std::uint64_t> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * 8));
  if (static_cast<std::size_t>(in.gcount()) != count * 8) {
    throw Error(ErrorKind::parse_error, "field file truncated");
  }
  char extra;
  if (in.read(&extra, 1)) throw Error(ErrorKind::parse_error, "trailing bytes after field data");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(to_little_endian(buf[i]));
    if (!std::isfinite(values[i])) throw Error(ErrorKind::parse_error, "field contains non-finite values");
  }
  return MatrixField(grid, std::move(values));
}

void write_field_file(const std::string& path, const MatrixField& field) {
  const std::string tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_input, "cannot open " + tmp + " for writing");
    try {
      write_field(out, field);
      out.close();
      if (!out) throw Error(ErrorKind::invalid_input, "failed writing " + tmp);
    } catch (...) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
  }
  commit(tmp, path);
}

MatrixField read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open field file " + path);
  return read_field(in);
}

void write_text_file(const std::string& path, const std::string& contents) {
  const std::string tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_input, "cannot open " + tmp + " for writing");
    out << contents;
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::invalid_input, "failed writing " + tmp);
    }
  }
  commit(tmp, path);
}

}  // namespace acs
