#pragma once
// Score-file ingestion for externally sampled logits, in two equivalent
// forms that must certify identically:
//
// Binary ("LVMS1" magic, version byte 0x01, little-endian):
//   char[5] magic, u8 version, u32 classes, u32 samples_per_input,
//   u32 num_inputs, f64 sigma, then num_inputs blocks of
//   samples_per_input x classes f64 logits (row-major).
//
// CSV: header "input_id,sample_id,logit_0,...,logit_{c-1}", one row per
// noise sample, inputs contiguous and sample ids 0..n-1 in order. CSV
// carries no sigma; it must come from the command line.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lvmrs/engine.hpp"

namespace lvmrs::io {

// Malformed or inconsistent score data; messages carry the byte offset
// (binary) or line number (CSV). The CLI maps this to its data-format
// exit code.
struct ScoreFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScoreFileHeader {
  std::uint32_t classes = 0;
  std::uint32_t samples_per_input = 0;
  std::uint32_t num_inputs = 0;
  std::optional<double> sigma;  // binary metadata; absent for CSV
};

struct ScoreFile {
  ScoreFileHeader header;
  std::vector<engine::ScoreMatrix> blocks;  // one matrix per input
};

ScoreFile read_score_file(const std::string& path);  // sniffs binary vs CSV

void write_binary_score_file(const std::string& path, double sigma,
                             const std::vector<engine::ScoreMatrix>& blocks);

void write_csv_score_file(const std::string& path,
                          const std::vector<engine::ScoreMatrix>& blocks);

}  // namespace lvmrs::io
