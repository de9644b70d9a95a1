#include <doctest.h>

#include <filesystem>

#include "amodal/errors.hpp"
#include "amodal/png_io.hpp"
#include "support.hpp"

using namespace amodal;
using testsupport::Rng;

TEST_CASE("png round-trips rgb images and masks") {
    Rng rng(10);
    for (int i = 0; i < 20; ++i) {
        const int h = rng.range(1, 48);
        const int w = rng.range(1, 48);
        const Image img = testsupport::random_image(rng, h, w);
        CHECK(decode_png_image(encode_png(img)) == img);

        const BinaryMask m = testsupport::random_mask(rng, h, w, rng.unit());
        CHECK(decode_png_mask(encode_png(m)) == m);
    }
}

TEST_CASE("png encoding is byte-stable") {
    Rng rng(11);
    const Image img = testsupport::random_image(rng, 33, 17);
    CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("png file io") {
    const auto dir = std::filesystem::temp_directory_path() / "amodal_png_test";
    std::filesystem::create_directories(dir);
    Rng rng(12);
    const Image img = testsupport::random_image(rng, 21, 34);
    write_png(dir / "img.png", img);
    CHECK(read_png_image(dir / "img.png") == img);

    const BinaryMask m = testsupport::random_mask(rng, 21, 34, 0.5);
    write_png(dir / "mask.png", m);
    CHECK(read_png_mask(dir / "mask.png") == m);

    // masks load from rgb files too (luminance threshold)
    write_png(dir / "img_as_mask.png", compose_on_background(Image(4, 4, kWhite),
                                                             BinaryMask(4, 4, true), kGray));
    const BinaryMask white = read_png_mask(dir / "img_as_mask.png");
    CHECK(white.count() == 16);
    std::filesystem::remove_all(dir);
}

TEST_CASE("png decode rejects garbage") {
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK_THROWS_AS(decode_png_image(junk), InvalidInputError);
    CHECK_THROWS_AS(read_png_image("/nonexistent/amodal.png"), InvalidInputError);
}
