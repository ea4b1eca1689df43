#include "debias/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace debias {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(std::string(context) + ": bad number '" + std::string(s) + "'");
  return v;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename failed for " + path.string() + ": " + ec.message());
  }
}

namespace {

std::string_view next_field(std::string_view& line, const char* context) {
  if (line.empty()) throw std::runtime_error(std::string(context) + ": missing field");
  const auto pos = line.find(',');
  std::string_view field = line.substr(0, pos);
  line = pos == std::string_view::npos ? std::string_view{} : line.substr(pos + 1);
  return field;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::string observed_to_csv(const ObservedDataset& d) {
  std::string out = "user,item,value\n";
  for (const auto& e : d.entries) {
    out += std::to_string(e.user + 1);
    out += ',';
    out += std::to_string(e.item + 1);
    out += ',';
    out += format_double(e.value);
    out += '\n';
  }
  return out;
}

ObservedDataset observed_from_csv(std::string_view text, QuantizationSpec spec) {
  ObservedDataset d;
  d.quantization = spec;
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::uint32_t max_user = 0, max_item = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "user,item,value")
        throw std::runtime_error("observed_from_csv: bad header");
      continue;
    }
    ObservedEntry e;
    std::string_view rest = line;
    const long user = std::stol(std::string(next_field(rest, "observed_from_csv")));
    const long item = std::stol(std::string(next_field(rest, "observed_from_csv")));
    if (user < 1 || item < 1)
      throw std::runtime_error("observed_from_csv: indices are 1-based, got line " +
                               std::to_string(line_no));
    e.user = static_cast<std::uint32_t>(user - 1);
    e.item = static_cast<std::uint32_t>(item - 1);
    e.value = parse_double(rest, "observed_from_csv");
    max_user = std::max(max_user, e.user);
    max_item = std::max(max_item, e.item);
    d.entries.push_back(e);
  }
  d.num_users = d.entries.empty() ? 0 : max_user + 1;
  d.num_items = d.entries.empty() ? 0 : max_item + 1;
  return d;
}

void write_observed(const std::filesystem::path& path, const ObservedDataset& d) {
  atomic_write_file(path, observed_to_csv(d));
}

ObservedDataset read_observed(const std::filesystem::path& path, QuantizationSpec spec) {
  return observed_from_csv(read_file(path), spec);
}

std::string matrix_to_csv(const RatingMatrix& m) {
  std::string out = "num_users,num_items\n";
  out += std::to_string(m.num_users) + "," + std::to_string(m.num_items) + "\n";
  for (std::size_t u = 0; u < m.num_users; ++u) {
    for (std::size_t i = 0; i < m.num_items; ++i) {
      if (i) out += ',';
      out += format_double(m.values(u, i));
    }
    out += '\n';
  }
  return out;
}

RatingMatrix matrix_from_csv(std::string_view text) {
  RatingMatrix m;
  std::size_t start = 0;
  auto end = text.find('\n');
  if (end == std::string_view::npos) throw std::runtime_error("matrix_from_csv: empty input");
  if (text.substr(0, end) != "num_users,num_items")
    throw std::runtime_error("matrix_from_csv: expected header 'num_users,num_items'");
  start = end + 1;
  end = text.find('\n', start);
  if (end == std::string_view::npos) throw std::runtime_error("matrix_from_csv: missing dimensions");
  {
    std::string_view dims = text.substr(start, end - start);
    std::string_view rest = dims;
    m.num_users = static_cast<std::size_t>(std::stoul(std::string(next_field(rest, "matrix header"))));
    m.num_items = static_cast<std::size_t>(std::stoul(std::string(rest)));
  }
  m.values.resize(static_cast<Eigen::Index>(m.num_users), static_cast<Eigen::Index>(m.num_items));
  start = end + 1;
  for (std::size_t u = 0; u < m.num_users; ++u) {
    end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    std::string_view rest = line;
    for (std::size_t i = 0; i < m.num_items; ++i)
      m.values(u, i) = parse_double(next_field(rest, "matrix_from_csv"), "matrix_from_csv");
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const RatingMatrix& m) {
  atomic_write_file(path, matrix_to_csv(m));
}

RatingMatrix read_matrix(const std::filesystem::path& path) {
  return matrix_from_csv(read_file(path));
}

}  // namespace debias
