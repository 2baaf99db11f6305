#include "zenoq/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <system_error>

namespace zenoq {

std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("atomic_write: cannot open " + tmp);
  const size_t written = std::fwrite(content.data(), 1, content.size(), f);
  const bool flushed = std::fflush(f) == 0;
  const bool closed = std::fclose(f) == 0;
  if (written != content.size() || !flushed || !closed) {
    std::remove(tmp.c_str());
    throw std::runtime_error("atomic_write: short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("atomic_write: cannot move " + tmp + " to " + path);
  }
}

const char* const kScanCsvHeader =
    "idx,g,dtf,dtm,det_x,det_y,det_z,re_l0,im_l0,re_l1,im_l1,re_l2,im_l2,re_l3,"
    "im_l3,fp_x,fp_y,fp_z,min_gap,defective";

std::string scan_csv(const std::vector<ScanRecord>& recs) {
  std::string out = kScanCsvHeader;
  out += '\n';
  for (const ScanRecord& r : recs) {
    out += std::to_string(r.idx);
    const double cols[] = {r.params.g,       r.params.dtf,     r.params.dtm,
                           r.detector.x(),   r.detector.y(),   r.detector.z()};
    for (double c : cols) {
      out += ',';
      out += format_g17(c);
    }
    for (const Complex& l : r.eigenvalues) {
      out += ',';
      out += format_g17(l.real());
      out += ',';
      out += format_g17(l.imag());
    }
    const double tail[] = {r.fixed_point.x(), r.fixed_point.y(), r.fixed_point.z(),
                           r.min_gap};
    for (double c : tail) {
      out += ',';
      out += format_g17(c);
    }
    out += ',';
    out += r.defective ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const std::vector<QubitState>& states) {
  std::string out = "n,x,y,z\n";
  for (size_t n = 0; n < states.size(); ++n) {
    const Bloch b = states[n].bloch();
    out += std::to_string(n);
    out += ',';
    out += format_g17(b.x());
    out += ',';
    out += format_g17(b.y());
    out += ',';
    out += format_g17(b.z());
    out += '\n';
  }
  return out;
}

}  // namespace zenoq
