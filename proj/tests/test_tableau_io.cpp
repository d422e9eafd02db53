#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "rowdae/tableau_io.hpp"

using namespace rowdae;

namespace {

std::string fixture(const char* name) { return std::string(ROWDAE_FIXTURE_DIR) + "/" + name; }

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void expect_identical(const RowTableau& a, const RowTableau& b) {
  EXPECT_EQ(a.kind(), b.kind());
  EXPECT_EQ(a.gamma(), b.gamma());
  EXPECT_EQ(a.alpha(), b.alpha());
  EXPECT_EQ(a.gamma_matrix(), b.gamma_matrix());
  EXPECT_EQ(a.b(), b.b());
  EXPECT_EQ(a.bhat(), b.bhat());
  ASSERT_EQ(a.dense().has_value(), b.dense().has_value());
  if (a.dense()) {
    EXPECT_EQ(a.dense()->c, b.dense()->c);
    EXPECT_EQ(a.dense()->d, b.dense()->d);
    EXPECT_EQ(a.dense()->e, b.dense()->e);
    EXPECT_EQ(a.dense()->f, b.dense()->f);
  }
  EXPECT_EQ(a.order(), b.order());
  EXPECT_EQ(a.embedded_order(), b.embedded_order());
}

}  // namespace

TEST(TableauIo, Tsit5daRoundTripIsBitExact) {
  const auto t = tsit5da();
  const auto path = temp_path(("rowdae_tsit5da_" + std::to_string(::getpid()) + ".tab").c_str());
  save_tableau(t, path);
  const auto u = load_tableau(path);
  expect_identical(t, u);
  EXPECT_EQ(u.name(), "tsit5da");
  std::remove(path.c_str());
}

TEST(TableauIo, Ros2RoundTripThroughStream) {
  std::stringstream ss;
  write_tableau(ros2(), ss);
  expect_identical(ros2(), parse_tableau(ss));
}

TEST(TableauIo, HandWrittenEuler) {
  const auto t = load_tableau(fixture("euler.tab"));
  EXPECT_EQ(t.stages(), 1u);
  EXPECT_EQ(t.gamma(), 1.0);
  EXPECT_EQ(t.kind(), MethodKind::row);
  EXPECT_EQ(t.b(), Vector{1.0});
  EXPECT_FALSE(t.has_embedded());
}

TEST(TableauIo, NonTriangularAlphaIsShapeError) {
  EXPECT_THROW(load_tableau(fixture("bad_alpha.tab")), ShapeError);
}

TEST(TableauIo, WrongDiagonalIsInvariantError) {
  EXPECT_THROW(load_tableau(fixture("bad_diagonal.tab")), InvariantError);
}

TEST(TableauIo, BadNumberReportsLine) {
  try {
    load_tableau(fixture("bad_number.tab"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(TableauIo, MissingFileIsParseError) {
  EXPECT_THROW(load_tableau(fixture("does_not_exist.tab")), ParseError);
}

TEST(TableauIo, ParseErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_tableau(in);
  };
  // Row too short.
  EXPECT_THROW(parse("kind: row\ns: 2\ngamma: 1\nalpha:\n0 0\n1\n"), ParseError);
  // Vector with the wrong length.
  EXPECT_THROW(parse("kind: row\ns: 1\ngamma: 1\nalpha:\n0\ngammaM:\n1\nb: 1 2\n"), ParseError);
  // Unknown key and unknown kind.
  EXPECT_THROW(parse("kind: row\ns: 1\nfoo: 2\n"), ParseError);
  EXPECT_THROW(parse("kind: implicit\n"), ParseError);
  // Missing b.
  EXPECT_THROW(parse("kind: row\ns: 1\ngamma: 1\nalpha:\n0\ngammaM:\n1\n"), ParseError);
  // Incomplete dense output.
  EXPECT_THROW(parse("kind: row\ns: 1\ngamma: 1\nalpha:\n0\ngammaM:\n1\nb: 1\nc: 0\n"),
               ParseError);
}

TEST(TableauIo, CommentsAndPlusSigns) {
  std::istringstream in(
      "# header\nkind: row # trailing\ns: 1\ngamma: +1.0\n\nalpha:\n0\ngammaM:\n1\nb: +1\n");
  const auto t = parse_tableau(in);
  EXPECT_EQ(t.gamma(), 1.0);
}
