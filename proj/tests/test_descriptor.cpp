#include <doctest.h>

#include "iwa/descriptor.hpp"

using namespace iwa;

namespace {

const char* kAdjointDemo = R"({
  "ring": {"p": 3, "precision": 8, "truncation": 32, "vars": 1},
  "modules": [ {"kind": "elementary", "factors": [[6558, 1]]} ]
})";

const char* kFuneqDemo = R"({
  "ring": {"p": 3, "precision": 8, "truncation": 32, "vars": 1},
  "modules": [
    {"kind": "elementary", "factors": [[0, 1]]},
    {"kind": "elementary", "factors": [[3]]}
  ]
})";

}  // namespace

TEST_CASE("descriptor parsing") {
    SUBCASE("full ring plus payload kinds") {
        Descriptor d = parse_descriptor(R"({
            "ring": {"p": 3, "precision": 4, "truncation": 8, "vars": 1},
            "modules": [

                {"kind": "elementary", "factors": [[3]]},
                {"kind": "square", "matrix": [[[3],[0]],[[0],[3]]]},
                {"kind": "finite", "level": 0, "orders": [2], "action": [[1]]}
            ]
        })");
        CHECK(d.ring.p == 3);
        CHECK(d.modules.size() == 3);
        CHECK(std::holds_alternative<ElementaryModule>(d.modules[0]));
        CHECK(std::holds_alternative<SquareModule>(d.modules[1]));
        CHECK(std::holds_alternative<FiniteModule>(d.modules[2]));
    }
    SUBCASE("malformed JSON is an input error") {
        CHECK_THROWS_AS(parse_descriptor("{"), input_error);
        CHECK_THROWS_AS(parse_descriptor(R"({"ring": {"p": 4, "precision": 1, "truncation": 1}})"),
                        input_error);
        CHECK_THROWS_AS(parse_descriptor(R"({"ring": {"p": 3, "precision": 1, "truncation": 1},
            "modules": [{"kind": "mystery"}]})"),
                        input_error);
    }
    SUBCASE("two-variable modules") {
        Descriptor d = parse_descriptor(R"({
            "ring": {"p": 3, "precision": 4, "truncation": 6, "vars": 2},
            "modules": [ {"kind": "elementary", "factors": [[[0, 1]]]} ]
        })");
        CHECK(d.modules2.size() == 1);
        CHECK(d.modules2[0].factors[0] == Series2::variable(d.ring, 2));
    }
}

TEST_CASE("run_command produces deterministic reports") {
    RunOptions opts;
    RunResult a = run_command("adjoint", kAdjointDemo, opts);
    RunResult b = run_command("adjoint", kAdjointDemo, opts);
    CHECK(a.exit_code == 0);
    CHECK(a.summary == b.summary);
    CHECK(a.text == b.text);
    CHECK(a.summary ==
          "== summary ==\n"
          "command=adjoint\n"
          "ring=p:3,a:8,m:32,vars:1\n"
          "levels=3\n"
          "item=module:0 exponents=1,2,3,4 fit=mu:0,lambda:1,nu:1 cross=1\n"
          "verdicts=pass:1,fail:0\n"
          "exit=0\n");
}

TEST_CASE("run_command verdict exit codes") {
    RunOptions opts;
    SUBCASE("funceq passes on symmetric char series") {
        RunResult r = run_command("funceq", kFuneqDemo, opts);
        CHECK(r.exit_code == 0);
        CHECK(r.summary.find("item=module:0 holds=1 epsilon=-1") != std::string::npos);
        CHECK(r.summary.find("item=module:1 holds=1 epsilon=1") != std::string::npos);
    }
    SUBCASE("funceq fails on an asymmetric series with exit 1") {
        RunResult r = run_command("funceq", R"({
            "ring": {"p": 3, "precision": 8, "truncation": 32, "vars": 1},
            "modules": [ {"kind": "elementary", "factors": [[6558, 1]]} ]
        })",
                                  opts);
        CHECK(r.exit_code == 1);
        CHECK(r.summary.find("holds=0") != std::string::npos);
    }
    SUBCASE("schema errors exit 2") {
        RunResult r = run_command("coinv", "{ not json", opts);
        CHECK(r.exit_code == 2);
        CHECK(r.summary.find("error=input") != std::string::npos);
    }
    SUBCASE("unknown command exits 2") {
        RunResult r = run_command("qmzzy", kFuneqDemo, opts);
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("coinv command reports finiteness") {
    RunOptions opts;
    opts.levels = 2;
    RunResult r = run_command("coinv", R"({
        "ring": {"p": 3, "precision": 8, "truncation": 32, "vars": 1},
        "modules": [
            {"kind": "elementary", "factors": [[6558, 1]]},
            {"kind": "elementary", "factors": [[0, 1]]}
        ]
    })",
                              opts);
    CHECK(r.exit_code == 0);
    CHECK(r.summary.find("item=module:0,level:0 finite=1 orders=[1]") != std::string::npos);
    CHECK(r.summary.find("item=module:0,level:2 finite=1 orders=[3]") != std::string::npos);
    CHECK(r.summary.find("item=module:1,level:0 finite=0") != std::string::npos);
}

TEST_CASE("precision and truncation overrides") {
    RunOptions opts;
    opts.precision = 6;
    opts.truncation = 16;
    RunResult r = run_command("prepare", kFuneqDemo, opts);
    CHECK(r.exit_code == 0);
    CHECK(r.summary.find("ring=p:3,a:6,m:16,vars:1") != std::string::npos);
}
