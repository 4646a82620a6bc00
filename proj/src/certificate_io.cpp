#include "lvmrs/certificate_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string_view>

namespace lvmrs::io {

const char* const kCertificateCsvHeader =
    "input_id,label,prediction,radius,rule,map,temperature,mass,alpha,sigma,"
    "n0,n,seed";

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line) {
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

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("certificate record: " + what);
}

double to_double(std::string_view f) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || p != f.data() + f.size())
    fail("bad number '" + std::string(f) + "'");
  return v;
}

template <typename T>
T to_int(std::string_view f) {
  T v{};
  const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || p != f.data() + f.size())
    fail("bad integer '" + std::string(f) + "'");
  return v;
}

}  // namespace

std::string format_record(const CertificateRecord& record) {
  const auto& cert = record.cert;
  std::string out = std::to_string(record.input_id);
  out += ',';
  if (record.label) out += std::to_string(*record.label);
  out += ',';
  out += cert.prediction == radius::kAbstain ? "abstain"
                                             : std::to_string(cert.prediction);
  out += ',';
  out += fmt_double(cert.radius);
  out += ',';
  out += radius::rule_name(cert.rule);
  out += ',';
  out += simplex::map_kind_name(cert.map.kind);
  out += ',';
  out += fmt_double(cert.map.temperature);
  out += ',';
  out += fmt_double(cert.map.mass);
  out += ',';
  out += fmt_double(cert.alpha);
  out += ',';
  out += fmt_double(cert.sigma);
  out += ',';
  out += std::to_string(cert.n0);
  out += ',';
  out += std::to_string(cert.n);
  out += ',';
  out += std::to_string(record.seed);
  return out;
}

CertificateRecord parse_record(const std::string& line) {
  const auto fields = split(line);
  if (fields.size() != 13)
    fail("expected 13 fields, found " + std::to_string(fields.size()));
  CertificateRecord record;
  record.input_id = to_int<std::uint32_t>(fields[0]);
  if (!fields[1].empty()) record.label = to_int<int>(fields[1]);
  auto& cert = record.cert;
  cert.prediction = fields[2] == "abstain" ? radius::kAbstain
                                           : to_int<int>(fields[2]);
  cert.radius = to_double(fields[3]);
  cert.rule = radius::rule_from_name(std::string(fields[4]));
  cert.map.kind = simplex::map_kind_from_name(std::string(fields[5]));
  cert.map.temperature = to_double(fields[6]);
  cert.map.mass = to_double(fields[7]);
  cert.alpha = to_double(fields[8]);
  cert.sigma = to_double(fields[9]);
  cert.n0 = to_int<std::int64_t>(fields[10]);
  cert.n = to_int<std::int64_t>(fields[11]);
  record.seed = to_int<std::uint64_t>(fields[12]);

  if (!(cert.radius >= 0.0) || !std::isfinite(cert.radius))
    fail("radius must be finite and >= 0");
  if (cert.prediction == radius::kAbstain && cert.radius != 0.0)
    fail("abstaining record must carry radius 0");
  if (cert.prediction < radius::kAbstain) fail("bad prediction index");
  return record;
}

void write_records(const std::string& path,
                   const std::vector<CertificateRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kCertificateCsvHeader << "\n";
  for (const auto& record : records) out << format_record(record) << "\n";
}

std::vector<CertificateRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCertificateCsvHeader)
    throw std::runtime_error("certificate file: missing header in " + path);
  std::vector<CertificateRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(parse_record(line));
  }
  return records;
}

}  // namespace lvmrs::io
