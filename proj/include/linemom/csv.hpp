#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linemom/profile.hpp"

namespace linemom {

/// Formats a double with 17 significant digits (bit-exact round trip).
std::string format_double(double v);

/// Reads an `x,value` CSV (optional `x,value` header). Grid uniformity is
/// validated with a relative step tolerance of 1e-9; parse failures report
/// the offending line number.
SampledProfile read_profile_csv(const std::string& path, ProfileKind kind);

/// Writes an `x,value` CSV with a header; complete-or-absent (temp+rename).
void write_profile_csv(const std::string& path, const SampledProfile& p);

/// Transmission input: three columns (omega, F_eta, F_ref) or two columns
/// (omega, eta). eta is always populated; the intensities only for
/// three-column files.
struct TransmissionData {
  SampledProfile eta;
  std::optional<SampledProfile> f_eta;
  std::optional<SampledProfile> f_ref;
};

TransmissionData read_transmission_csv(const std::string& path);

/// Writes named columns of equal length; complete-or-absent.
void write_columns_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns);

/// Atomically writes arbitrary text (temp file + rename).
void write_text_file(const std::string& path, const std::string& text);

/// FNV-1a 64-bit content hash, as "0x"-prefixed hex.
std::string file_hash_hex(const std::string& path);

}  // namespace linemom
