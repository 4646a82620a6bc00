#pragma once
// Certificate records as CSV lines. Doubles are printed with %.17g so every
// record round-trips losslessly through parse_record.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lvmrs/radius.hpp"

namespace lvmrs::io {

struct CertificateRecord {
  std::uint32_t input_id = 0;
  std::optional<int> label;
  radius::Certificate cert;
  std::uint64_t seed = 0;
};

extern const char* const kCertificateCsvHeader;

std::string format_record(const CertificateRecord& record);

// Parses one CSV row (no header) and revalidates the record invariants
// (radius >= 0, abstain implies radius 0). Throws std::runtime_error on
// malformed rows.
CertificateRecord parse_record(const std::string& line);

void write_records(const std::string& path,
                   const std::vector<CertificateRecord>& records);

std::vector<CertificateRecord> read_records(const std::string& path);

}  // namespace lvmrs::io
