#pragma once
// Locale-independent formatting and atomic file output.

#include <string>
#include <vector>

#include "zenoq/fixedpoint.hpp"

namespace zenoq {

// Fixed 17-significant-digit general format, '.' decimal separator, exact
// value round trip. NaN renders as "nan", infinities as "inf"/"-inf".
std::string format_g17(double v);

// Writes content to path via a temporary file in the same directory plus
// rename, so the file is either fully present or absent. Raises
// std::runtime_error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);

// CSV header shared by scan and sweep outputs.
extern const char* const kScanCsvHeader;

// One line per record, grid order, format_g17 fields, defective as 0/1.
std::string scan_csv(const std::vector<ScanRecord>& records);

// Trajectory CSV: header "n,x,y,z", one row per state.
std::string trajectory_csv(const std::vector<QubitState>& states);

}  // namespace zenoq
