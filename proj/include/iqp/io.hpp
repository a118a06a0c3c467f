#pragma once

// Text formats for matrices, secrets and samples, plus JSON views of
// instances and attack reports.

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "iqp/attacks.hpp"
#include "iqp/f2la.hpp"
#include "iqp/scheme.hpp"

namespace iqp {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what);
    std::size_t line;  // 1-based, 0 when not tied to a line
};

/// "m n" header, m rows of '0'/'1', then optional '#' comment lines.
std::string emit_matrix(const BitMatrix& m, std::span<const std::string> comments = {});
BitMatrix parse_matrix(std::string_view text);

inline constexpr const char* bremner_format_version = "bremner-compat/1";
/// Rows of 0/1 entries separated by whitespace or commas, optionally wrapped
/// in brackets as printed by numpy; '#' lines are ignored.
BitMatrix parse_bremner_matrix(std::string_view text);

/// Bits packed most significant first, zero bits appended to fill the last byte.
std::vector<unsigned char> pack_bits(const BitVector& v);
BitVector unpack_bits(std::span<const unsigned char> bytes, std::size_t n);

std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(std::string_view text);

/// Base64 line followed by "n=<bits>".
std::string emit_secret(const BitVector& s);
BitVector parse_secret(std::string_view text);

std::string emit_samples(std::span<const BitVector> samples);
std::vector<BitVector> parse_samples(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

nlohmann::json to_json(const InstanceParams& p);
nlohmann::json to_json(const SecretCertificate& c);
nlohmann::json to_json(const AttackReport& r, bool include_timing = true);
/// Instance metadata; construction blocks only when requested.
nlohmann::json instance_metadata(const IqpInstance& inst, bool include_construction);

}  // namespace iqp
