#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gscat/graph.hpp"
#include "gscat/json_io.hpp"
#include "gallery.hpp"

using namespace gscat;
using nlohmann::json;

TEST_CASE("graph construction validates its input") {
    CHECK_THROWS_AS(ScatteringGraph(0, 0, Matrix::Zero(0, 0)), ValidationError);
    CHECK_THROWS_AS(ScatteringGraph(1, -1, Matrix::Zero(0, 0)), ValidationError);
    CHECK_THROWS_AS(ScatteringGraph(1, 1, Matrix::Zero(3, 3)), ValidationError);

    Matrix bad(2, 2);
    bad << 0.0, 1.0, 2.0, 0.0;  // not Hermitian
    CHECK_THROWS_AS(ScatteringGraph(2, 0, bad), ValidationError);

    Matrix inf = Matrix::Zero(1, 1);
    inf(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ScatteringGraph(1, 0, inf), ValidationError);

    Matrix almost(2, 2);
    almost << 0.0, Complex(1.0, 1.0), Complex(1.0, -1.0 + 1e-14), 0.0;
    CHECK_NOTHROW(ScatteringGraph(2, 0, almost));  // within eps_herm
}

TEST_CASE("block accessors slice the Hamiltonian consistently") {
    const auto g = gallery::g3();
    CHECK(g.block_a().isZero(0.0));
    CHECK(g.block_b()(0, 0) == Complex(1.0, 0.0));
    CHECK(g.block_b()(0, 1) == Complex(1.0, 0.0));
    CHECK(g.block_d()(0, 0) == Complex(0.0, 0.0));

    Matrix reassembled(3, 3);
    reassembled.topLeftCorner(2, 2) = g.block_a();
    reassembled.bottomLeftCorner(1, 2) = g.block_b();
    reassembled.topRightCorner(2, 1) = g.block_b().adjoint();
    reassembled.bottomRightCorner(1, 1) = g.block_d();
    CHECK((reassembled - g.hhat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("attachment projector is an exact idempotent") {
    const auto g = gallery::g4();
    const RealMatrix p = projector_pn(g);
    CHECK((p * p - p).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.trace() == static_cast<double>(g.n()));
}

TEST_CASE("tolerance validation") {
    ToleranceConfig tol;
    CHECK_NOTHROW(tol.validate());
    tol.eps_rank = 0.0;
    CHECK_THROWS_AS(tol.validate(), ValidationError);
    tol = ToleranceConfig{};
    tol.eps_snap = tol.eps_root_cluster / 2.0;
    CHECK_THROWS_AS(tol.validate(), ValidationError);
}

TEST_CASE("graph JSON parsing: hermitian completion and rejection") {
    const json good = {{"n", 2},
                       {"m", 0},
                       {"entries", {{{"i", 0}, {"j", 1}, {"re", 1.0}, {"im", 2.0}}}}};
    const auto g = graph_from_json(good);
    CHECK(g.hhat()(0, 1) == Complex(1.0, 2.0));
    CHECK(g.hhat()(1, 0) == Complex(1.0, -2.0));

    json bad_mirror = good;
    bad_mirror["entries"].push_back({{"i", 1}, {"j", 0}, {"re", 1.0}, {"im", 2.0}});
    CHECK_THROWS_AS(graph_from_json(bad_mirror), ValidationError);

    json ok_mirror = good;
    ok_mirror["entries"].push_back({{"i", 1}, {"j", 0}, {"re", 1.0}, {"im", -2.0}});
    CHECK_NOTHROW(graph_from_json(ok_mirror));

    json dup = good;
    dup["entries"].push_back({{"i", 0}, {"j", 1}, {"re", 5.0}, {"im", 2.0}});
    CHECK_THROWS_AS(graph_from_json(dup), ValidationError);

    const json imag_diag = {{"n", 1},
                            {"m", 0},
                            {"entries", {{{"i", 0}, {"j", 0}, {"re", 0.0}, {"im", 1.0}}}}};
    CHECK_THROWS_AS(graph_from_json(imag_diag), ValidationError);

    const json out_of_range = {{"n", 1},
                               {"m", 0},
                               {"entries", {{{"i", 0}, {"j", 3}, {"re", 1.0}}}}};
    CHECK_THROWS_AS(graph_from_json(out_of_range), ValidationError);

    CHECK_THROWS_AS(graph_from_json(json::array()), ParseError);
    CHECK_THROWS_AS(graph_from_json(json{{"n", 1}}), ParseError);
}

TEST_CASE("graph JSON parsing: tolerances block") {
    json j = {{"n", 1}, {"m", 0}, {"entries", json::array()}};
    j["tolerances"] = {{"eps_rank", 1e-7}, {"quad_target", 1e-6}};
    const auto g = graph_from_json(j);
    CHECK(g.tol().eps_rank == 1e-7);
    CHECK(g.tol().quad_target == 1e-6);
    CHECK(g.tol().eps_herm == ToleranceConfig{}.eps_herm);

    j["tolerances"]["eps_snap"] = "big";
    CHECK_THROWS_AS(graph_from_json(j), ParseError);
}

TEST_CASE("save/load round trip is bit-exact") {
    Matrix h(3, 3);
    h << 1.0 / 3.0, Complex(0.1, -0.7), 0.0,
         Complex(0.1, 0.7), -2.0, Complex(M_PI, 1e-7),
         0.0, Complex(M_PI, -1e-7), 1e-12;
    const ScatteringGraph g(1, 2, h);
    const auto path = std::filesystem::temp_directory_path() / "roundtrip_graph.json";
    save_graph(g, path.string());
    const ScatteringGraph back = load_graph(path.string());
    REQUIRE(back.n() == g.n());
    REQUIRE(back.m() == g.m());
    CHECK((back.hhat() - g.hhat()).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("malformed JSON file reports a parse error") {
    const auto path = std::filesystem::temp_directory_path() / "malformed_graph.json";
    std::ofstream(path.string()) << "{ not json";
    CHECK_THROWS_AS(load_graph(path.string()), ParseError);
    CHECK_THROWS_AS(load_graph("/nonexistent/nowhere.json"), ParseError);
    std::filesystem::remove(path);
}
