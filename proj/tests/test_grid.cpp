#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "selfs/errors.hpp"
#include "selfs/grid.hpp"
#include "support.hpp"

using namespace selfs;
using selfs::testing::Gen;

namespace {

// Values that survive the float32 payload unchanged.
GridField float_exact(Gen& g, std::size_t rows, std::size_t cols, FieldKind kind) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) {
        const double u = g.uniform();
        x = kind == FieldKind::mask ? (u < 0.4 ? 1.0 : 0.0)
                                    : static_cast<double>(static_cast<float>(kind == FieldKind::real ? 8.0 * u - 4.0 : u));
    }
    return {rows, cols, 0.0125, kind, std::move(v)};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("selfs_test_" + name);
}

}  // namespace

TEST_CASE("GridField enforces kind invariants") {
    CHECK_NOTHROW(GridField(2, 2, 0.1, FieldKind::prob, {0.0, 0.5, 0.5, 1.0}));
    CHECK_THROWS_AS(GridField(2, 2, 0.1, FieldKind::mask, {0.0, 0.3, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(GridField(2, 2, 0.1, FieldKind::prob, {0.0, 1.5, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(GridField(1, 2, 0.1, FieldKind::real, {0.0, std::nan("")}), ValidationError);
    CHECK_THROWS_AS(GridField(0, 2, 0.1, FieldKind::real, {}), ValidationError);
    CHECK_THROWS_AS(GridField(1, 2, 0.0, FieldKind::real, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(GridField(1, 2, 0.1, FieldKind::real, {0.0, 0.0}, std::vector<std::uint8_t>{1}), ValidationError);
    CHECK_THROWS_AS(WavelengthBand(0.2, 0.1), ArgumentError);
}

TEST_CASE("GRID1 decode of a small prob field") {
    const auto f = GridField(2, 2, 0.5, FieldKind::prob, {0.0, 0.5, 0.5, 1.0});
    const auto bytes = encode_grid(f);
    CHECK(bytes.substr(0, 16) == "GRID1\n2 2 0.5 pr");
    const auto back = decode_grid(bytes);
    CHECK(back.rows() == 2);
    CHECK(back.cols() == 2);
    CHECK(back == f);
}

TEST_CASE("GRID1 byte layout for a 205x205 mask") {
    const auto f = GridField::zeros(205, 205, 0.0125, FieldKind::mask);
    const auto bytes = encode_grid(f);
    const std::string header = "GRID1\n205 205 0.0125 mask\n";
    CHECK(bytes.substr(0, header.size()) == header);
    CHECK(bytes.size() == header.size() + 205u * 205u * 4u);
}

TEST_CASE("GRID1 payload is little-endian float32, row-major") {
    const auto f = GridField(1, 2, 1.0, FieldKind::real, {1.0, -2.0});
    const auto bytes = encode_grid(f);
    const std::string header = "GRID1\n1 2 1 real\n";
    REQUIRE(bytes.size() == header.size() + 8);
    // 1.0f = 0x3F800000, -2.0f = 0xC0000000
    const std::string payload = bytes.substr(header.size());
    CHECK(payload == std::string("\x00\x00\x80\x3F\x00\x00\x00\xC0", 8));
}

TEST_CASE("GRID1 errors") {
    CHECK_THROWS_AS(decode_grid("GRID2\n1 1 1 real\n\0\0\0\0"), FormatError);
    CHECK_THROWS_AS(decode_grid("GRID1\n1 1 1 bogus\n"), FormatError);
    CHECK_THROWS_AS(decode_grid("GRID1\n1 x 1 real\n"), FormatError);
    CHECK_THROWS_AS(decode_grid("GRID1\n1 1 1 real"), FormatError);
    CHECK_THROWS_AS(decode_grid(std::string("GRID1\n2 1 1 real\n\0\0\0\0", 21)), TruncationError);
    CHECK_THROWS_AS(decode_grid(std::string("GRID1\n1 1 1 real masked\n\0\0\0\0", 28)), TruncationError);

    const auto bad = GridField(1, 1, 1.0, FieldKind::real, {0.3});
    auto bytes = encode_grid(bad);
    bytes.replace(bytes.find("real"), 4, "mask");
    CHECK_THROWS_AS(decode_grid(bytes), ValidationError);

    CHECK_THROWS_AS(read_grid(temp_path("does_not_exist.grid")), IoError);
}

TEST_CASE("GRID1 round trip is bit-exact for every kind, with and without eval mask") {
    Gen g(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto kind = std::array{FieldKind::mask, FieldKind::prob, FieldKind::real}[trial % 3];
        auto f = float_exact(g, g.index(1, 40), g.index(1, 40), kind);
        if (trial % 2) f = f.with_eval_mask(g.eval_mask(f.size()));
        const auto path = temp_path("roundtrip.grid");
        write_grid(f, path);
        const auto back = read_grid(path);
        CHECK(back == f);
        // write/read/write
        const auto again = temp_path("roundtrip2.grid");
        write_grid(back, again);
        std::ifstream a(path, std::ios::binary), b(again, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
        std::filesystem::remove(path);
        std::filesystem::remove(again);
    }
}

TEST_CASE("taper_zero_pad centres the field, odd remainder bottom/right") {
    const auto f = GridField(205, 205, 0.0125, FieldKind::real, std::vector<double>(205 * 205, 1.0));
    const auto big = taper_zero_pad(f, 615, 615);
    CHECK(big(204, 300) == 0.0);
    CHECK(big(205, 205) == 1.0);
    CHECK(big(409, 409) == 1.0);
    CHECK(big(410, 300) == 0.0);

    const auto pow2 = taper_zero_pad(f, 256, 256);
    const auto off = pad_offsets(205, 205, 256, 256);
    CHECK(off.top == 25);
    CHECK(off.left == 25);
    CHECK(pow2(24, 100) == 0.0);
    CHECK(pow2(25, 100) == 1.0);
    CHECK(pow2(229, 100) == 1.0);
    CHECK(pow2(230, 100) == 0.0);  // 26 rows of padding below
    CHECK(pow2.sum() == f.sum());

    CHECK(taper_zero_pad(f, 205, 205) == f);
    CHECK_THROWS_AS(taper_zero_pad(f, 204, 300), ArgumentError);
    CHECK_THROWS_AS(crop_taper(f, 206, 10), ArgumentError);
}

TEST_CASE("pad then crop is exact for random shapes") {
    Gen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto rows = g.index(1, 30);
        const auto cols = g.index(1, 30);
        auto f = g.real(rows, cols);
        if (trial % 3 == 0) f = f.with_eval_mask(g.eval_mask(f.size()));
        const auto padded = taper_zero_pad(f, rows + g.index(0, 17), cols + g.index(0, 17));
        CHECK(padded.sum() == doctest::Approx(f.sum()).epsilon(1e-12));
        CHECK(crop_taper(padded, rows, cols) == f);
    }
}

TEST_CASE("next_pow2_dims") {
    CHECK(next_pow2_dims(205, 205) == std::pair<std::size_t, std::size_t>{256, 256});
    CHECK(next_pow2_dims(256, 256) == std::pair<std::size_t, std::size_t>{256, 256});
    CHECK(next_pow2_dims(129, 200) == std::pair<std::size_t, std::size_t>{256, 256});
    CHECK(next_pow2_dims(1, 3) == std::pair<std::size_t, std::size_t>{1, 4});
}
