#include "lvmrs/score_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

namespace lvmrs::io {

namespace {

constexpr char kMagic[5] = {'L', 'V', 'M', 'S', '1'};
constexpr unsigned char kVersion = 0x01;
constexpr std::size_t kHeaderBytes = 5 + 1 + 4 + 4 + 4 + 8;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>(bits >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = bits << 8 | p[i];
  return std::bit_cast<double>(bits);
}

[[noreturn]] void fail_at(std::size_t byte_offset, const std::string& what) {
  throw ScoreFormatError("score file: " + what + " at byte offset " +
                         std::to_string(byte_offset));
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw ScoreFormatError("score file: " + what + " at CSV line " +
                         std::to_string(line));
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail_line(line, "bad floating-point field '" + std::string(field) + "'");
  if (!std::isfinite(v)) fail_line(line, "non-finite logit");
  return v;
}

std::uint64_t parse_uint(std::string_view field, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail_line(line, "bad integer field '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

ScoreFile read_binary(std::ifstream& in) {
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < kHeaderBytes) fail_at(raw.size(), "truncated header");
  if (std::memcmp(raw.data(), kMagic, 5) != 0) fail_at(0, "bad magic");
  if (bytes[5] != kVersion)
    fail_at(5, "unsupported version " + std::to_string(bytes[5]));

  ScoreFile file;
  file.header.classes = get_u32(bytes + 6);
  file.header.samples_per_input = get_u32(bytes + 10);
  file.header.num_inputs = get_u32(bytes + 14);
  file.header.sigma = get_f64(bytes + 18);
  if (file.header.classes < 2) fail_at(6, "need at least 2 classes");
  if (file.header.samples_per_input < 2) fail_at(10, "need at least 2 samples");
  if (file.header.num_inputs == 0) fail_at(14, "empty input set");
  if (!(*file.header.sigma > 0.0) || !std::isfinite(*file.header.sigma))
    fail_at(18, "sigma must be positive and finite");

  const std::size_t block_values =
      static_cast<std::size_t>(file.header.samples_per_input) *
      file.header.classes;
  const std::size_t expected =
      kHeaderBytes + 8 * block_values * file.header.num_inputs;
  if (raw.size() != expected) {
    throw ScoreFormatError(
        "score file: body length mismatch, expected " +
        std::to_string(expected) + " bytes, found " +
        std::to_string(raw.size()));
  }

  std::size_t offset = kHeaderBytes;
  for (std::uint32_t b = 0; b < file.header.num_inputs; ++b) {
    std::vector<double> data(block_values);
    for (std::size_t i = 0; i < block_values; ++i, offset += 8) {
      data[i] = get_f64(bytes + offset);
      if (!std::isfinite(data[i])) fail_at(offset, "non-finite logit");
    }
    file.blocks.push_back(engine::make_score_matrix(
        file.header.samples_per_input, file.header.classes, std::move(data)));
  }
  return file;
}

ScoreFile read_csv(std::ifstream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail_line(1, "empty file");
  const auto head = split_csv(line);
  if (head.size() < 4 || head[0] != "input_id" || head[1] != "sample_id")
    fail_line(1, "expected header input_id,sample_id,logit_0,...");
  const std::size_t c = head.size() - 2;
  for (std::size_t k = 0; k < c; ++k) {
    if (head[k + 2] != "logit_" + std::to_string(k))
      fail_line(1, "unexpected header column '" + std::string(head[k + 2]) +
                       "'");
  }

  ScoreFile file;
  file.header.classes = static_cast<std::uint32_t>(c);
  std::vector<double> block;
  std::size_t block_rows = 0;
  std::uint64_t current_input = 0;
  bool any = false;

  auto flush_block = [&]() {
    if (file.header.samples_per_input == 0) {
      file.header.samples_per_input = static_cast<std::uint32_t>(block_rows);
    } else if (block_rows != file.header.samples_per_input) {
      throw ScoreFormatError(
          "score file: sample-count mismatch for input " +
          std::to_string(current_input) + ", expected " +
          std::to_string(file.header.samples_per_input) + ", found " +
          std::to_string(block_rows));
    }
    file.blocks.push_back(engine::make_score_matrix(
        block_rows, c, std::move(block)));
    block.clear();
    block_rows = 0;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != c + 2)
      fail_line(line_no, "expected " + std::to_string(c + 2) +
                             " columns, found " +
                             std::to_string(fields.size()));
    const std::uint64_t input_id = parse_uint(fields[0], line_no);
    const std::uint64_t sample_id = parse_uint(fields[1], line_no);
    if (!any) {
      if (input_id != 0) fail_line(line_no, "input ids must start at 0");
      any = true;
    } else if (input_id == current_input + 1) {
      flush_block();
      current_input = input_id;
    } else if (input_id != current_input) {
      fail_line(line_no, "input ids must be contiguous and ordered");
    }
    if (sample_id != block_rows)
      fail_line(line_no, "sample ids must run 0..n-1 in order");
    for (std::size_t k = 0; k < c; ++k)
      block.push_back(parse_double(fields[k + 2], line_no));
    ++block_rows;
  }
  if (!any) fail_line(line_no, "no data rows");
  flush_block();
  file.header.num_inputs = static_cast<std::uint32_t>(file.blocks.size());
  return file;
}

}  // namespace

ScoreFile read_score_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScoreFormatError("score file: cannot open " + path);
  char head[9] = {};
  in.read(head, 9);
  const auto got = static_cast<std::size_t>(in.gcount());
  const bool binary = got >= 5 && std::memcmp(head, kMagic, 5) == 0;
  const bool csv = got >= 9 && std::memcmp(head, "input_id,", 9) == 0;
  if (!binary && !csv) {
    throw ScoreFormatError(
        "score file: neither the LVMS1 magic nor the input_id,sample_id CSV "
        "header at byte offset 0");
  }
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_csv(in);
}

void write_binary_score_file(const std::string& path, double sigma,
                             const std::vector<engine::ScoreMatrix>& blocks) {
  if (blocks.empty())
    throw std::invalid_argument("write_binary_score_file: no blocks");
  const std::size_t n = blocks.front().rows;
  const std::size_t c = blocks.front().cols;
  std::string out;
  out.append(kMagic, 5);
  out.push_back(static_cast<char>(kVersion));
  put_u32(out, static_cast<std::uint32_t>(c));
  put_u32(out, static_cast<std::uint32_t>(n));
  put_u32(out, static_cast<std::uint32_t>(blocks.size()));
  put_f64(out, sigma);
  for (const auto& block : blocks) {
    if (block.rows != n || block.cols != c)
      throw std::invalid_argument(
          "write_binary_score_file: blocks must share one shape");
    for (double v : block.data) put_f64(out, v);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void write_csv_score_file(const std::string& path,
                          const std::vector<engine::ScoreMatrix>& blocks) {
  if (blocks.empty())
    throw std::invalid_argument("write_csv_score_file: no blocks");
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  const std::size_t c = blocks.front().cols;
  file << "input_id,sample_id";
  for (std::size_t k = 0; k < c; ++k) file << ",logit_" << k;
  file << "\n";
  char buf[32];
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    for (std::size_t i = 0; i < block.rows; ++i) {
      file << b << ',' << i;
      for (std::size_t k = 0; k < block.cols; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", block.data[i * block.cols + k]);
        file << ',' << buf;
      }
      file << "\n";
    }
  }
}

}  // namespace lvmrs::io
