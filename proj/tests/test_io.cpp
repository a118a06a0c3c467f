#include <filesystem>
#include <string>

#include "doctest.h"
#include "iqp/io.hpp"

using namespace iqp;

namespace {

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_matrix(text);
    } catch (const ParseError& e) {
        return e.line;
    }
    return 0;
}

// MSB-first packing written out bit by bit.
std::vector<unsigned char> pack_reference(const BitVector& v) {
    std::vector<unsigned char> out;
    unsigned char cur = 0;
    std::size_t filled = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        cur = static_cast<unsigned char>((cur << 1) | (v.get(i) ? 1 : 0));
        if (++filled == 8) {
            out.push_back(cur);
            cur = 0;
            filled = 0;
        }
    }
    if (filled) out.push_back(static_cast<unsigned char>(cur << (8 - filled)));
    return out;
}

std::vector<unsigned char> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("matrix files round-trip") {
    Rng rng(50);
    for (int t = 0; t < 200; ++t) {
        const BitMatrix m = random_matrix(rng.below(40), rng.below(90) + 1, rng);
        const std::string text = emit_matrix(m);
        CHECK(parse_matrix(text) == m);
        CHECK(emit_matrix(parse_matrix(text)) == text);
    }
    const std::vector<std::string> rows{"101", "011"};
    const std::vector<std::string> notes{"seed 7", "family stabilizer"};
    const std::string text = emit_matrix(BitMatrix::from_strings(rows), notes);
    CHECK(text == "2 3\n101\n011\n# seed 7\n# family stabilizer\n");
    CHECK(parse_matrix(text) == BitMatrix::from_strings(rows));
    CHECK(parse_matrix("2 3\r\n101\r\n011\r\n") == BitMatrix::from_strings(rows));
}

TEST_CASE("matrix parse errors carry line numbers") {
    CHECK(parse_error_line("") == 1);
    CHECK(parse_error_line("2\n10\n01\n") == 1);
    CHECK(parse_error_line("x 2\n10\n01\n") == 1);
    CHECK(parse_error_line("3 2\n10\n01\n") == 4);
    CHECK(parse_error_line("3 2\n10\n011\n11\n") == 3);
    CHECK(parse_error_line("3 2\n10\n01\n1x\n") == 4);
    CHECK(parse_error_line("2 2\n10\n01\n11\n") == 4);
    CHECK(parse_error_line("2 2\n10\n01\n# fine\nnope\n") == 5);
    CHECK_THROWS_WITH_AS(parse_matrix("2 2\n10\n2\n"), "line 3: expected 2 bits, found 1", ParseError);
}

TEST_CASE("bit packing and base64") {
    Rng rng(51);
    for (std::size_t n = 0; n <= 200; ++n) {
        const BitVector v = BitVector::random(n, rng);
        const auto packed = pack_bits(v);
        CHECK(packed == pack_reference(v));
        CHECK(unpack_bits(packed, n) == v);
        const std::string file = emit_secret(v);
        CHECK(parse_secret(file) == v);
        CHECK(file.substr(file.find('\n') + 1) == "n=" + std::to_string(n) + "\n");
    }
    // RFC 4648 test vectors
    CHECK(base64_encode(bytes_of("")).empty());
    CHECK(base64_encode(bytes_of("f")) == "Zg==");
    CHECK(base64_encode(bytes_of("fo")) == "Zm8=");
    CHECK(base64_encode(bytes_of("foo")) == "Zm9v");
    CHECK(base64_encode(bytes_of("foobar")) == "Zm9vYmFy");
    CHECK(base64_decode("Zm9vYg==") == bytes_of("foob"));
    CHECK(base64_decode("Zm9vYmE=") == bytes_of("fooba"));
    CHECK_THROWS_AS(base64_decode("Zm9"), ParseError);
    CHECK_THROWS_AS(base64_decode("Zm9*"), ParseError);

    CHECK(pack_bits(BitVector::from_string("1")) == std::vector<unsigned char>{0x80});
    CHECK(pack_bits(BitVector::from_string("000000011")) == std::vector<unsigned char>{0x01, 0x80});
    CHECK_THROWS_AS(unpack_bits(std::vector<unsigned char>{0x01}, 7), ParseError);
    CHECK_THROWS_AS(unpack_bits(std::vector<unsigned char>{0x01, 0x00}, 7), ParseError);
}

TEST_CASE("published challenge secret") {
    const std::string published = "cyCxfXKxLxXu3YWND2fSzf+YKtZJFLWY1J0l2rBao0A5zVWRSKA=";
    const auto bytes = base64_decode(published);
    CHECK(bytes.size() == 38);
    // 300 bits leave four spare bits; they are the low bits of the last byte, and zero
    CHECK((bytes.back() & 0x0F) == 0);
    CHECK((bytes.front() & 0xF0) != 0);
    const BitVector s = parse_secret(published + "\nn=300\n");
    CHECK(s.size() == 300);
    CHECK(base64_encode(pack_bits(s)) == published);
    CHECK_THROWS_AS(parse_secret(published + "\nn=296\n"), ParseError);
    CHECK_THROWS_AS(parse_secret(published + "\n"), ParseError);
    CHECK_THROWS_AS(parse_secret(published + "\nm=300\n"), ParseError);
}

TEST_CASE("sample files") {
    Rng rng(52);
    std::vector<BitVector> samples;
    for (int i = 0; i < 50; ++i) samples.push_back(BitVector::random(17, rng));
    const std::string text = emit_samples(samples);
    CHECK(parse_samples(text) == samples);
    CHECK(parse_samples("").empty());
    try {
        parse_samples("0101\n0011\n011\n");
        FAIL("ragged samples accepted");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_samples("01a1\n"), ParseError);
}

TEST_CASE("compatibility matrix parser") {
    const std::vector<std::string> rows{"011", "101"};
    const BitMatrix expect = BitMatrix::from_strings(rows);
    CHECK(parse_bremner_matrix("[[0 1 1]\n [1 0 1]]\n") == expect);
    CHECK(parse_bremner_matrix("# header\n0,1,1\n1,0,1\n") == expect);
    CHECK(parse_bremner_matrix("011\n101\n") == expect);
    CHECK(parse_bremner_matrix("[[0, 1, 1], [1, 0, 1]]") == expect);
    CHECK_THROWS_AS(parse_bremner_matrix("0 1 1\n1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_bremner_matrix("0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_bremner_matrix("# nothing\n"), ParseError);
    CHECK(std::string(bremner_format_version) == "bremner-compat/1");
}

TEST_CASE("atomic writes") {
    const auto dir = std::filesystem::temp_directory_path() / "iqp_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "m.txt";
    write_file_atomic(path, "first\n");
    write_file_atomic(path, "second\n");
    CHECK(read_file(path) == "second\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);
    CHECK_THROWS(read_file(dir / "missing"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("json views") {
    Rng rng(53);
    const IqpInstance inst = assemble_instance(40, 60, 2, rng);
    const auto meta = instance_metadata(inst, false);
    CHECK(meta["family"] == "stabilizer");
    CHECK(meta["params"]["n"] == 40);
    CHECK(meta["params"]["w"] == inst.params.w());
    CHECK(meta["secret"] == base64_encode(pack_bits(*inst.secret)));
    CHECK_FALSE(meta.contains("construction"));
    CHECK(instance_metadata(inst, true)["construction"]["f"].size() == inst.params.m1);

    const AttackReport rep = radical_attack(inst.h);
    const auto j = to_json(rep, false);
    CHECK_FALSE(j.contains("wall_time"));
    CHECK(to_json(rep).contains("wall_time"));
    CHECK(j["outcome"] == (rep.found ? "found" : "failed"));
}
