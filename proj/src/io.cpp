#include "iqp/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace iqp {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_size(std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

BitVector parse_bit_line(std::string_view line, std::size_t expected, std::size_t line_no) {
    if (line.size() != expected)
        throw ParseError(line_no, "expected " + std::to_string(expected) + " bits, found " + std::to_string(line.size()));
    BitVector v(expected);
    for (std::size_t j = 0; j < expected; ++j) {
        if (line[j] == '1')
            v.set(j);
        else if (line[j] != '0')
            throw ParseError(line_no, "unexpected character '" + std::string(1, line[j]) + "'");
    }
    return v;
}

std::vector<std::string> matrix_rows(const BitMatrix& m) {
    std::vector<std::string> rows;
    rows.reserve(m.rows());
    for (const auto& r : m.row_vectors()) rows.push_back(r.to_string());
    return rows;
}

}  // namespace

ParseError::ParseError(std::size_t line_no, const std::string& what)
    : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}

std::string emit_matrix(const BitMatrix& m, std::span<const std::string> comments) {
    std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    out.reserve(out.size() + m.rows() * (m.cols() + 1));
    for (const auto& r : m.row_vectors()) {
        out += r.to_string();
        out += '\n';
    }
    for (const auto& c : comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    return out;
}

BitMatrix parse_matrix(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(1, "missing \"m n\" header");
    const std::string_view header = trim(lines[0]);
    const auto space = header.find_first_of(" \t");
    std::size_t m = 0, n = 0;
    if (space == std::string_view::npos || !parse_size(header.substr(0, space), m) ||
        !parse_size(trim(header.substr(space)), n))
        throw ParseError(1, "header must be \"m n\"");
    if (lines.size() < m + 1) throw ParseError(lines.size() + 1, "expected " + std::to_string(m) + " matrix rows");

    std::vector<BitVector> rows;
    rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) rows.push_back(parse_bit_line(lines[i + 1], n, i + 2));
    for (std::size_t i = m + 1; i < lines.size(); ++i) {
        const auto line = lines[i];
        if (line.empty() && i + 1 == lines.size()) break;
        if (line.empty() || line.front() != '#') throw ParseError(i + 1, "trailing content after matrix rows");
    }
    return BitMatrix(n, std::move(rows));
}

BitMatrix parse_bremner_matrix(std::string_view text) {
    std::string cleaned(text);
    std::replace(cleaned.begin(), cleaned.end(), ']', '\n');
    std::vector<BitVector> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;
    for (auto line : split_lines(cleaned)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::string bits;
        for (char ch : line) {
            if (ch == '0' || ch == '1')
                bits += ch;
            else if (!(std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == '['))
                throw ParseError(line_no, "unexpected character '" + std::string(1, ch) + "'");
        }
        if (bits.empty()) continue;
        if (rows.empty()) width = bits.size();
        rows.push_back(parse_bit_line(bits, width, line_no));
    }
    if (rows.empty()) throw ParseError(0, "no matrix rows found");
    return BitMatrix(width, std::move(rows));
}

std::vector<unsigned char> pack_bits(const BitVector& v) {
    std::vector<unsigned char> bytes((v.size() + 7) / 8, 0);
    for (auto i : v.support()) bytes[i / 8] |= static_cast<unsigned char>(0x80U >> (i % 8));
    return bytes;
}

BitVector unpack_bits(std::span<const unsigned char> bytes, std::size_t n) {
    if (bytes.size() != (n + 7) / 8) throw ParseError(0, "secret has the wrong number of bytes for n = " + std::to_string(n));
    BitVector v(n);
    for (std::size_t i = 0; i < 8 * bytes.size(); ++i) {
        const bool bit = (bytes[i / 8] >> (7 - i % 8)) & 1U;
        if (i >= n) {
            if (bit) throw ParseError(0, "nonzero padding bits in secret");
        } else if (bit) {
            v.set(i);
        }
    }
    return v;
}

std::string base64_encode(std::span<const unsigned char> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int len = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                    static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::vector<unsigned char> base64_decode(std::string_view text) {
    text = trim(text);
    if (text.size() % 4 != 0) throw ParseError(0, "base64 length is not a multiple of four");
    std::vector<unsigned char> out(3 * text.size() / 4 + 1);
    const int len = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                    static_cast<int>(text.size()));
    if (len < 0) throw ParseError(0, "invalid base64");
    std::size_t padding = 0;
    if (!text.empty() && text.back() == '=') ++padding;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(len) - padding);
    return out;
}

std::string emit_secret(const BitVector& s) {
    return base64_encode(pack_bits(s)) + "\nn=" + std::to_string(s.size()) + "\n";
}

BitVector parse_secret(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.size() < 2) throw ParseError(0, "secret file needs a base64 line and an \"n=<bits>\" line");
    const std::string_view size_line = trim(lines[1]);
    std::size_t n = 0;
    if (size_line.substr(0, 2) != "n=" || !parse_size(size_line.substr(2), n))
        throw ParseError(2, "expected \"n=<bits>\"");
    std::vector<unsigned char> bytes;
    try {
        bytes = base64_decode(lines[0]);
    } catch (const ParseError& e) {
        throw ParseError(1, e.what());
    }
    return unpack_bits(bytes, n);
}

std::string emit_samples(std::span<const BitVector> samples) {
    std::string out;
    for (const auto& s : samples) {
        out += s.to_string();
        out += '\n';
    }
    return out;
}

std::vector<BitVector> parse_samples(std::string_view text) {
    std::vector<BitVector> out;
    const auto lines = split_lines(text);
    std::size_t width = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;
        if (out.empty()) width = lines[i].size();
        if (width == 0) throw ParseError(i + 1, "empty sample line");
        out.push_back(parse_bit_line(lines[i], width, i + 1));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json to_json(const InstanceParams& p) {
    return {{"n", p.n}, {"m", p.m}, {"g", p.g}, {"m1", p.m1}, {"m2", p.m2}, {"d", p.d}, {"w", p.w()}};
}

nlohmann::json to_json(const SecretCertificate& c) {
    return {{"g", c.g_actual},
            {"rad_dim", c.rad_dim},
            {"code_dim", c.code_dim},
            {"m1", c.m1_observed},
            {"rad_doubly_even", c.rad_doubly_even}};
}

nlohmann::json to_json(const AttackReport& r, bool include_timing) {
    nlohmann::json j = {{"attack", r.attack},
                        {"outcome", r.found ? "found" : "failed"},
                        {"iterations", r.iterations_used},
                        {"candidates_tested", r.candidates_tested},
                        {"kernel_dims", r.kernel_dims}};
    if (r.found) {
        j["secret"] = base64_encode(pack_bits(*r.secret));
        j["certificate"] = to_json(r.certificate);
    } else {
        j["failure"] = r.failure;
    }
    if (include_timing) j["wall_time"] = r.wall_seconds;
    return j;
}

nlohmann::json instance_metadata(const IqpInstance& inst, bool include_construction) {
    nlohmann::json j = {{"family", to_string(inst.family)}, {"seed", inst.seed}, {"params", to_json(inst.params)}};
    if (inst.secret) j["secret"] = base64_encode(pack_bits(*inst.secret));
    if (inst.construction) {
        const auto& c = *inst.construction;
        j["secret_rows"] = c.secret_rows;
        if (include_construction) {
            j["construction"] = {{"h_pre", matrix_rows(c.h_pre)},
                                 {"row_perm", c.row_perm},
                                 {"q", matrix_rows(c.q)},
                                 {"f", matrix_rows(c.f_block)},
                                 {"d", matrix_rows(c.d_block)}};
        }
    }
    return j;
}

}  // namespace iqp
