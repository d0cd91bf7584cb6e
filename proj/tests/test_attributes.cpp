#include <filesystem>

#include "attgrasp/attributes.h"
#include "attgrasp/rng.h"
#include "doctest.h"

using namespace attgrasp;

namespace {

// the worked six-token dictionary: eos, red, black, yellow, cylinder, cube
Vocabulary dict6() {
  return Vocabulary::from_tokens({"red", "black", "yellow", "cylinder", "cube"}, 16);
}

// independent brute-force oracle for the similarity function
double similarity_oracle(const AttributeLabel& a, const AttributeLabel& b) {
  int hits = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    int x = a.values[i], y = b.values[i];
    bool match = true;
    if (x != y) match = false;
    if (x == 0) match = false;
    if (match) ++hits;
  }
  return double(hits) / double(a.values.size());
}

}  // namespace

TEST_CASE("similarity worked examples") {
  CHECK(similarity(AttributeLabel({1, 4}), AttributeLabel({1, 5})) == 0.5);
  CHECK(similarity(AttributeLabel({1, 0}), AttributeLabel({2, 0})) == 0.0);
  CHECK(similarity(AttributeLabel({3, 5}), AttributeLabel({3, 5})) == 1.0);
  CHECK(similarity(AttributeLabel({0, 0}), AttributeLabel({0, 0})) == 0.0);
  CHECK_THROWS_AS(similarity(AttributeLabel({1, 2}), AttributeLabel({1, 2, 3})),
                  DimensionMismatch);
}

TEST_CASE("similarity: symmetry and oracle equivalence on random labels") {
  Rng rng(123);
  for (int i = 0; i < 10000; ++i) {
    int n = rng.uniform_int(2, 3);
    AttributeLabel a, b;
    for (int j = 0; j < n; ++j) {
      a.values.push_back(rng.uniform_int(0, 6));
      b.values.push_back(rng.uniform_int(0, 6));
    }
    double s = similarity(a, b);
    CHECK(s == similarity(b, a));
    CHECK(s == doctest::Approx(similarity_oracle(a, b)).epsilon(1e-12));
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("label_of_text worked examples") {
  Vocabulary v = dict6();
  CHECK(label_of_text(QueryText::parse("red cylinder"), v, 2) == AttributeLabel({1, 4}));
  CHECK(label_of_text(QueryText::parse("red"), v, 2) == AttributeLabel({1, 0}));
  // slots are type-directed, not positional
  CHECK(label_of_text(QueryText::parse("cylinder red"), v, 2) == AttributeLabel({1, 4}));
  CHECK_THROWS_AS(label_of_text(QueryText::parse("red sphere"), v, 2), UnknownToken);
  CHECK_THROWS_AS(label_of_text(QueryText::parse("red black"), v, 2), PreconditionError);
}

TEST_CASE("label round trip on canonical labels") {
  Vocabulary v = Vocabulary::standard(8);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    // color slot 1..3 or 6..7; shape slot 4..5 or 8..9; either may be null
    const int colors[] = {0, 1, 2, 3, 6, 7};
    const int shapes[] = {0, 4, 5, 8, 9};
    int c = colors[rng.uniform_int(0, 5)];
    int s = shapes[rng.uniform_int(0, 4)];
    if (c == 0 && s == 0) continue;
    AttributeLabel l({c, s});
    QueryText t = text_of_label(l, v);
    CHECK(label_of_text(t, v, 2) == l);
  }
}

TEST_CASE("extend vocabulary") {
  Vocabulary v = dict6();
  CHECK(v.size() == 6);
  Vocabulary v2 = v.extended("apple");
  CHECK(v2.id("apple") == 6);
  CHECK(v2.size() == 7);
  // existing ids unchanged
  for (int i = 0; i < 6; ++i) CHECK(v2.token(i) == v.token(i));
  CHECK_THROWS_AS(v.extended("red"), DuplicateToken);

  // paper-style name query with n = 3
  AttributeLabel l = label_of_text(QueryText::parse("apple, red cylinder"), v2, 3);
  CHECK(l == AttributeLabel({1, 4, 6}));
  CHECK(text_of_label(l, v2).str() == "apple red cylinder");
}

TEST_CASE("vocabulary save/load") {
  auto dir = std::filesystem::temp_directory_path() / "attgrasp_vocab";
  std::filesystem::create_directories(dir);
  auto path = (dir / "vocab.txt").string();
  Vocabulary v = Vocabulary::standard(32).extended("apple");
  v.save(path);
  Vocabulary w = Vocabulary::load(path, 32);
  CHECK(w.size() == v.size());
  for (int i = 0; i < v.size(); ++i) CHECK(w.token(i) == v.token(i));
  CHECK(w.kind("apple") == TokenKind::name);
  CHECK(w.kind("red") == TokenKind::color);
  CHECK(w.kind("cuboid") == TokenKind::shape);
  std::filesystem::remove_all(dir);
}

TEST_CASE("padded labels for cross-phase comparison") {
  AttributeLabel two({1, 4});
  AttributeLabel three = two.padded(3);
  CHECK(three.n() == 3);
  CHECK(three.values[2] == 0);
  CHECK(similarity(three, AttributeLabel({1, 4, 6})) == doctest::Approx(2.0 / 3.0));
}
