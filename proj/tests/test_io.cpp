#include "sandwichkit/io/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace sandwichkit;
using io::json;
using Q = Rational;

namespace {

const char* fenchel_text = R"({
  "functions": {
    "f": {"form": "V", "samples": [[[-1], 0], [[1], "0.0"]]},
    "g": {"form": "V", "samples": [[[-2], 2], [[0], 0], [["4/2"], 2.0]]}
  },
  "maps": {"C": {"matrix": [[1]]}},
  "task": {"kind": "fenchel", "f": "f", "g": "g", "C": "C", "queries": [[3], ["1/2"]]}
})";

std::string input_error(const std::string& text)
{
    try {
        io::ScenarioReader<Q> r(io::parse_document(text));
        r.duality();
    } catch (const io::InputError& e) {
        return e.what();
    } catch (const StructuralError& e) {
        return std::string("structural: ") + e.what();
    }
    return "";
}

}  // namespace

TEST(ExactJson, FloatsKeepTheirLexeme)
{
    auto j = io::parse_exact_json(R"({"a": 0.1, "b": 3, "c": 1e-3})");
    EXPECT_EQ(j["a"], "0.1");
    EXPECT_EQ(j["b"], 3);
    EXPECT_EQ(j["c"], "1e-3");
}

TEST(ExactJson, SyntaxErrorsCiteLineAndColumn)
{
    try {
        io::parse_exact_json("{\n  \"a\": [1,\n  2 3]\n}");
        FAIL();
    } catch (const io::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(ExactJson, DuplicateKeysRejected)
{
    EXPECT_THROW(io::parse_exact_json(R"({"a": 1, "a": 2})"), io::InputError);
}

TEST(Document, NumeralsAreCanonicalized)
{
    auto doc = io::parse_document(fenchel_text);
    EXPECT_EQ(doc["functions"]["f"]["samples"][1][1], "0");
    EXPECT_EQ(doc["functions"]["g"]["samples"][2][0][0], "2");
    EXPECT_EQ(doc["task"]["queries"][1][0], "1/2");
}

TEST(Document, RoundTripIsIdentity)
{
    auto doc = io::parse_document(fenchel_text);
    auto text = io::serialize_document(doc);
    EXPECT_EQ(io::parse_document(text), doc);
    EXPECT_EQ(io::serialize_document(io::parse_document(text)), text);
}

TEST(Document, UnknownSectionRejected)
{
    EXPECT_THROW(io::parse_document(R"({"functions": {}, "extras": 1})"), io::InputError);
}

TEST(Reader, BuildsTheFenchelScenario)
{
    io::ScenarioReader<Q> r(io::parse_document(fenchel_text));
    EXPECT_EQ(r.task_kind(), "fenchel");
    auto s = r.duality();
    EXPECT_EQ(s.kind, Kind::fenchel);
    ASSERT_EQ(s.queries.size(), 2u);
    EXPECT_EQ(s.queries[1].coeffs, Vec<Q>{Q(1, 2)});
    auto g = r.function("g");
    EXPECT_EQ(g.points()[2], Vec<Q>{Q(2)});
    EXPECT_EQ(eval(g, Vec<Q>{Q(1)}), Extended<Q>(Q(1)));
}

TEST(Reader, HFormFunctions)
{
    io::ScenarioReader<Q> r(io::parse_document(R"({"functions": {"s": {"form": "H", "pieces": [[[1], 0], [[-1], "1/3"]]}}})"));
    auto s = r.function("s");
    EXPECT_FALSE(s.is_vform());
    EXPECT_EQ(eval(s, Vec<Q>{Q(-1)}), Extended<Q>(Q(4, 3)));
}

TEST(Reader, ErrorsNameTheField)
{
    auto msg = input_error(R"({"functions": {"f": {"form": "V", "samples": [[[1], "x"]]}}, "task": {"kind": "sublevel", "psi": "f", "B": "B"}})");
    EXPECT_NE(msg.find("functions.f"), std::string::npos) << msg;
    msg = input_error(R"({"task": {"kind": "fenchel", "f": "f", "g": "g", "C": "C", "queries": [[1]]}})");
    EXPECT_FALSE(msg.empty());
    msg = input_error(R"({"functions": {"f": {"form": "V", "samples": [[[0], 0]]}}, "task": {"kind": "nonsense"}})");
    EXPECT_NE(msg.find("nonsense"), std::string::npos) << msg;
}

TEST(Reader, DimensionClashNamesBothObjects)
{
    auto msg = input_error(R"({
      "functions": {"f": {"form": "V", "samples": [[[0], 0], [[1], 0]]},
                    "g": {"form": "V", "samples": [[[0, 0], 0], [[1, 1], 0]]}},
      "maps": {"C": {"matrix": [[1]]}},
      "task": {"kind": "fenchel", "f": "f", "g": "g", "C": "C", "queries": [[1]]}})");
    EXPECT_NE(msg.find("'C'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'g'"), std::string::npos) << msg;
}

// Every bundled scenario survives parse -> serialize -> parse unchanged.
TEST(Corpus, EveryScenarioRoundTrips)
{
    const char* dir = std::getenv("SANDWICHKIT_SCENARIOS");
    if (!dir)
        GTEST_SKIP() << "SANDWICHKIT_SCENARIOS not set";
    int seen = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".json")
            continue;
        ++seen;
        auto doc = io::parse_document(io::read_file(e.path().string()));
        auto again = io::parse_document(io::serialize_document(doc));
        EXPECT_EQ(doc, again) << e.path();
    }
    EXPECT_GE(seen, 10);
}
