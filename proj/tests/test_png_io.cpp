#include <gtest/gtest.h>

#include <fstream>

#include "omnizoom/png_io.hpp"
#include "support.hpp"

namespace omnizoom {
namespace {

std::span<const std::uint8_t> bytes_of(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

TEST(Quantize, RoundHalfUpAndClamp) {
  EXPECT_EQ(quantize(0.0, BitDepth::eight), 0);
  EXPECT_EQ(quantize(1.0, BitDepth::eight), 255);
  EXPECT_EQ(quantize(1.7, BitDepth::eight), 255);
  EXPECT_EQ(quantize(-0.2, BitDepth::eight), 0);
  EXPECT_EQ(quantize(0.5 / 255, BitDepth::eight), 1);
  EXPECT_EQ(quantize(0.49 / 255, BitDepth::eight), 0);
  EXPECT_EQ(quantize(1.0, BitDepth::sixteen), 65535);
  EXPECT_EQ(quantize(0.5, BitDepth::sixteen), 32768);
}

TEST(Png, EightBitRoundTripIsExactOnGrid) {
  ErpImage img(4, 8, 3);
  for (Index k = 0; k < img.samples().size(); ++k) img.samples().data()[k] = (k * 37 % 256) / 255.0;
  const ErpImage back = decode_png(bytes_of(encode_png(img)));
  ASSERT_TRUE(back.same_shape(img));
  EXPECT_LE(testing::max_abs_diff(back, img), 1e-15);
}

TEST(Png, SixteenBitRoundTrip) {
  const ErpImage img = testing::random_image(4, 8, 4, 1);
  const ErpImage back = decode_png(bytes_of(encode_png(img, BitDepth::sixteen)));
  ASSERT_TRUE(back.same_shape(img));
  EXPECT_LE(testing::max_abs_diff(back, img), 0.5 / 65535 + 1e-12);
}

TEST(Png, ChannelCounts) {
  for (Index c = 1; c <= 4; ++c) {
    const ErpImage img = testing::random_image(2, 4, c, 10 + c);
    const ErpImage back = decode_png(bytes_of(encode_png(img)));
    EXPECT_EQ(back.channels(), c);
    EXPECT_LE(testing::max_abs_diff(back, img), 0.5 / 255 + 1e-12);
  }
}

TEST(Png, EncodingIsDeterministic) {
  const ErpImage img = testing::random_image(16, 32, 3, 2);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(Png, AspectPolicy) {
  const std::string png = encode_png(ErpImage(4, 6, 1, 0.5, AspectPolicy::any));
  EXPECT_THROW(decode_png(bytes_of(png)), Error);
  EXPECT_NO_THROW(decode_png(bytes_of(png), AspectPolicy::any));
}

TEST(Png, CorruptInputIsIoError) {
  std::string png = encode_png(ErpImage(4, 8, 3, 0.25));
  try {
    decode_png(bytes_of(std::string("not a png at all")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_png(bytes_of(png)), Error);
}

TEST(Png, FileRoundTripAndMissingFile) {
  testing::TempDir dir("png");
  const ErpImage img = testing::random_image(8, 16, 3, 3);
  write_png(img, dir.path() / "a.png");
  const ErpImage back = read_png(dir.path() / "a.png");
  EXPECT_LE(testing::max_abs_diff(back, img), 0.5 / 255 + 1e-12);
  try {
    read_png(dir.path() / "missing.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
  EXPECT_THROW(write_png(img, dir.path() / "no" / "such" / "dir.png"), Error);
}

}  // namespace
}  // namespace omnizoom
