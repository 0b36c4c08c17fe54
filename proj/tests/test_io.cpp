#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "bcov/io.hpp"
#include "bcov/report.hpp"

using namespace bcov;
using io::json;

namespace {

json round_trip_text(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST(Json, DocumentAndSchema) {
    const json d = io::document({{"a", 1}, {"b", "x"}});
    EXPECT_EQ(d.begin().key(), "schema");
    EXPECT_EQ(d["schema"], 1);
    EXPECT_EQ(d["a"], 1);
    EXPECT_NO_THROW(io::check_schema(d));
    EXPECT_NO_THROW(io::check_schema(json{{"points", json::array()}}));
    EXPECT_THROW(io::check_schema(json{{"schema", 2}}), io::SchemaError);
}

TEST(Json, Integers) {
    EXPECT_EQ(io::integer_to_json(Integer(-42)), -42);
    const Integer big("123456789012345678901234567890");
    const json j = io::integer_to_json(big);
    EXPECT_TRUE(j.is_string());
    EXPECT_EQ(io::integer_from_json(j), big);
    EXPECT_EQ(io::integer_from_json(json(7)), 7);
    EXPECT_THROW(io::integer_from_json(json("seven")), io::SchemaError);
    EXPECT_THROW(io::integer_from_json(json(1.5)), io::SchemaError);
}

TEST(Json, MatricesGroupsHoms) {
    const IntMatrix m{{6, 4}, {4, 6}};
    EXPECT_EQ(io::matrix_from_json(round_trip_text(io::to_json(m))), m);
    EXPECT_EQ(io::matrix_from_json(json::array(), 3).cols(), 3u);
    EXPECT_THROW(io::matrix_from_json(json::parse("[[1,2],[3]]")), io::SchemaError);
    EXPECT_THROW(io::matrix_from_json(json(3)), io::SchemaError);

    const FgAbelianGroup g(2, {Integer(2), Integer(6)});
    EXPECT_EQ(io::group_from_json(round_trip_text(io::to_json(g))), g);
    EXPECT_EQ(io::to_json(g).dump(), R"({"rank":2,"torsion":[2,6]})");
    EXPECT_THROW(io::group_from_json(json{{"torsion", {2}}}), io::SchemaError);
    EXPECT_THROW(io::group_from_json(json{{"rank", -1}}), io::SchemaError);

    const GroupHom h(FgAbelianGroup::free(2), FgAbelianGroup::free(3), IntMatrix{{1, 0}, {1, 0}, {1, 0}});
    const auto h2 = io::hom_from_json(round_trip_text(io::to_json(h)));
    EXPECT_EQ(h2.matrix(), h.matrix());
    EXPECT_EQ(h2.domain(), h.domain());
    EXPECT_EQ(h2.codomain(), h.codomain());

    const auto s = io::to_json(smith_normal_form(m));
    EXPECT_EQ(s["diagonal"], json::parse("[2,10]"));
}

TEST(Json, SixTermSequences) {
    for (const auto& seq : {ktheory::folding_sequence(), ktheory::circle_sequence(), ktheory::lattes_sequence()}) {
        const json j = io::to_json(seq);
        const auto back = io::sequence_from_json(round_trip_text(io::document(j)));
        EXPECT_EQ(io::to_json(back), j);
        EXPECT_EQ(io::to_json(ktheory::solve_six_term(back)), io::to_json(ktheory::solve_six_term(seq)));
    }
    EXPECT_THROW(io::sequence_from_json(json{{"nodes", json::array()}, {"maps", json::array()}}), io::SchemaError);
    json bad = io::to_json(ktheory::folding_sequence());
    bad["maps"][0] = json{{"what", 1}};
    EXPECT_THROW(io::sequence_from_json(bad), io::SchemaError);
}

TEST(Json, SolutionStatuses) {
    const auto folding = io::to_json(ktheory::solve_six_term(ktheory::folding_sequence()));
    EXPECT_TRUE(folding["fully_determined"].get<bool>());
    for (const auto& u : folding["unknowns"]) EXPECT_EQ(u["status"], "determined");
    const auto lattes = io::to_json(ktheory::solve_six_term(ktheory::lattes_sequence()));
    EXPECT_FALSE(lattes["fully_determined"].get<bool>());
    for (const auto& u : lattes["unknowns"]) {
        EXPECT_EQ(u["status"], "unconstrained");
        EXPECT_FALSE(u["blocking_maps"].empty());
    }
}

TEST(Json, SpherePointsAndBranchData) {
    const std::vector<SpherePoint> pts{SpherePoint::finite({1.5, -2}), SpherePoint::infinity(), SpherePoint::finite(0.0)};
    const auto back = io::points_from_json(round_trip_text(io::points_to_json(pts)));
    ASSERT_EQ(back.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(chordal(back[i], pts[i]), 0.0);
    EXPECT_TRUE(io::point_from_json(json("inf")).is_infinity());
    EXPECT_THROW(io::point_from_json(json(3)), io::SchemaError);
    EXPECT_THROW(io::point_from_json(json("nowhere")), io::SchemaError);

    const auto bd = ratmap::analyze(ratmap::lattes_map(), 5);
    const json j = io::to_json(bd);
    const auto bd2 = io::branch_data_from_json(round_trip_text(io::document(j)));
    EXPECT_EQ(io::to_json(bd2), j);
    EXPECT_TRUE(j["postcritical_set"]["finite"].get<bool>());
    EXPECT_EQ(j["critical_points"].size(), 6u);
}

TEST(Json, PLMapsAndProfiles) {
    const auto fold = plcover::PLMap::fold();
    EXPECT_EQ(io::plmap_from_json(round_trip_text(io::to_json(fold))), fold);
    EXPECT_EQ(io::plmap_from_json(json::parse(R"({"breakpoints":["0","1/2",1],"values":[0,"1","0"]})")), fold);
    EXPECT_THROW(io::plmap_from_json(json{{"breakpoints", {"0", "1"}}}), io::SchemaError);
    EXPECT_THROW(io::plmap_from_json(json::parse(R"({"breakpoints":["0","x"],"values":["0","1"]})")), io::SchemaError);
    EXPECT_THROW(io::plmap_from_json(json::parse(R"({"breakpoints":["0","1"],"values":["0","1/2"]})")),
                 std::invalid_argument);

    const auto p = io::to_json(plcover::constraint_profile(fold, 2));
    EXPECT_EQ(p["generic_size"], 4);
    EXPECT_EQ(p["exceptional"].size(), 5u);
    EXPECT_EQ(p["exceptional"][0]["point"], "0");
    const auto f = io::to_json(plcover::essential_freeness(plcover::PLMap::identity(), 1, 0));
    EXPECT_FALSE(f["essentially_free"].get<bool>());
    EXPECT_EQ(f["witness"]["lo"], "0");
    EXPECT_EQ(f["witness"]["hi"], "1");
}

TEST(Json, FiniteModels) {
    const json j = json::parse(R"({"schema":1,"points":["c","a","b"],"map":{"a":"c","b":"c"}})");
    const auto s = io::finite_model_from_json(j);
    EXPECT_EQ(s.labels(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(io::to_json(io::finite_model_from_json(io::to_json(s))), io::to_json(s));
    const auto classes = io::to_json(s, finmodel::rn_classes(s, 1));
    EXPECT_EQ(classes["classes"], json::parse(R"([["a","b"],["c"]])"));
    const auto b = io::to_json(s, finmodel::bratteli(s, 2));
    EXPECT_EQ(b["levels"].size(), 3u);
    EXPECT_EQ(b["levels"][1]["total_dimension"], 5);
    EXPECT_THROW(io::finite_model_from_json(json::parse(R"({"points":["a"],"map":{"a":"z"}})")), io::SchemaError);
    EXPECT_THROW(io::finite_model_from_json(json::parse(R"({"map":{}})")), io::SchemaError);
    EXPECT_THROW(io::finite_model_from_json(json::parse(R"({"schema":3,"points":[]})")), io::SchemaError);
}

TEST(Json, SampleDataFilesLoad) {
    const std::string dir = BCOV_DATA_DIR;
    auto load = [&](const std::string& name) {
        std::ifstream in(dir + "/" + name);
        EXPECT_TRUE(in.good()) << name;
        return json::parse(in);
    };
    EXPECT_NO_THROW(io::sequence_from_json(load("folding_sequence.json")));
    EXPECT_NO_THROW(io::sequence_from_json(load("circle_sequence.json")));
    EXPECT_NO_THROW(io::sequence_from_json(load("lattes_sequence.json")));
    const auto torsion = ktheory::solve_six_term(io::sequence_from_json(load("torsion_sequence.json")));
    EXPECT_FALSE(torsion.unknowns.empty());
    EXPECT_EQ(io::plmap_from_json(load("fold.json")), plcover::PLMap::fold());
    EXPECT_NO_THROW(io::plmap_from_json(load("tent3.json")));
    EXPECT_EQ(io::finite_model_from_json(load("two_to_one.json")).size(), 6u);
    EXPECT_EQ(io::finite_model_from_json(load("cycle_with_tail.json")).size(), 5u);
}

TEST(Report, ExpectedTableKeysAreUnique) {
    std::set<std::string> keys;
    for (const auto& e : report::kExpected) {
        EXPECT_TRUE(keys.insert(e.key).second) << e.key;
        EXPECT_FALSE(std::string(e.reference).empty());
    }
    EXPECT_THROW(report::expected("nope"), std::out_of_range);
}

TEST(Report, AllExamplesPass) {
    for (const char* id : report::kExampleIds) {
        const auto r = report::run_example(id);
        EXPECT_TRUE(r.passed()) << report::render_text(r);
        for (const auto& c : r.checks) EXPECT_TRUE(c.matched) << id << " " << c.key << ": " << c.computed;
        const json j = report::to_json(r);
        EXPECT_EQ(j["schema"], 1);
        EXPECT_EQ(j["example"], id);
        EXPECT_TRUE(j["passed"].get<bool>());
    }
    EXPECT_THROW(report::run_example("mandelbrot"), std::invalid_argument);
}

TEST(Report, LattesLabelsHeuristics) {
    const auto r = report::run_example("lattes");
    ASSERT_EQ(r.heuristics.size(), 2u);
    const auto text = report::render_text(r);
    EXPECT_NE(text.find("HEURISTIC EVIDENCE (finite sampling, not a proof)"), std::string::npos);
    EXPECT_NE(text.find("underdetermined"), std::string::npos);
    const json j = report::to_json(r);
    EXPECT_EQ(j["heuristic_evidence"].size(), 2u);
    EXPECT_EQ(j["artifacts"]["density"]["point_count"], 1365);
}

TEST(Report, DeterministicForFixedSeed) {
    report::ExampleOptions a, b;
    a.seed = b.seed = 7;
    EXPECT_EQ(report::to_json(report::run_example("lattes", a)).dump(),
              report::to_json(report::run_example("lattes", b)).dump());
}

TEST(Report, FailedCheckFailsReport) {
    report::ExampleOptions opt;
    opt.density_epsilon = 1e-3;  // unattainable bound
    const auto r = report::run_example("lattes", opt);
    EXPECT_FALSE(r.passed());
    EXPECT_NE(report::render_text(r).find("SOME CHECKS FAILED"), std::string::npos);
}
