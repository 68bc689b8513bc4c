#include <doctest.h>

#include "rklab/graph.hpp"
#include "test_util.hpp"

using namespace rklab;
using namespace rktest;

TEST_CASE("graph construction and accessors") {
    WeightedGraph g = triangle_graph();
    CHECK(g.num_vertices() == 3);
    CHECK(g.x0() == 0);
    CHECK(g.strength(0) == doctest::Approx(2.0));
    CHECK(g.strength(1) == doctest::Approx(2.0));
    CHECK(g.weight(0, 1) == doctest::Approx(1.0));
    CHECK(g.weight(1, 0) == doctest::Approx(1.0));
    CHECK(g.u_vertices() == std::vector<int>{1, 2});
    CHECK(g.u_position(0) == -1);
    CHECK(g.u_position(1) == 0);
    CHECK(g.u_position(2) == 1);
    CHECK(g.index_of("b") == 2);

    WeightedGraph e = edge_graph();
    CHECK(e.strength(0) == doctest::Approx(2.0));
    CHECK(e.neighbors(0).size() == 1);
}

TEST_CASE("graph validation errors") {
    auto kind_of = [](auto&& build) {
        try {
            build();
        } catch (const GraphError& err) {
            return err.kind;
        }
        return GraphError::Kind::BadInput;
    };
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a", "b"}, "x0", {{0, 1, 1.0}});
          }) == GraphError::Kind::Disconnected);
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a"}, "x0", {{0, 1, -1.0}});
          }) == GraphError::Kind::NonpositiveWeight);
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a"}, "x0", {{0, 1, 0.0}});
          }) == GraphError::Kind::NonpositiveWeight);
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a"}, "x0", {{0, 0, 1.0}, {0, 1, 1.0}});
          }) == GraphError::Kind::SelfLoop);
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a"}, "x0", {{0, 1, 1.0}, {1, 0, 2.0}});
          }) == GraphError::Kind::DuplicateEdge);
    CHECK(kind_of([] {
              WeightedGraph({"x0", "a"}, "zz", {{0, 1, 1.0}});
          }) == GraphError::Kind::MissingX0);
}

TEST_CASE("graph json parsing") {
    const char* text = R"({"vertices": ["x0", "a"], "x0": "x0",
                           "edges": [{"u": "x0", "v": "a", "w": 2.0}]})";
    WeightedGraph g = WeightedGraph::from_json_text(text);
    CHECK(g.num_vertices() == 2);
    CHECK(g.weight(0, 1) == doctest::Approx(2.0));

    // integer vertex ids are accepted too
    const char* nums = R"({"vertices": [0, 1], "x0": 0,
                           "edges": [{"u": 0, "v": 1, "w": 1.5}]})";
    WeightedGraph h = WeightedGraph::from_json_text(nums);
    CHECK(h.weight(0, 1) == doctest::Approx(1.5));

    CHECK_THROWS_AS(WeightedGraph::from_json_text("{not json"), GraphError);
    CHECK_THROWS_AS(WeightedGraph::from_json_text(R"({"vertices": []})"),
                    GraphError);
    // unknown endpoint label
    CHECK_THROWS_AS(WeightedGraph::from_json_text(
                        R"({"vertices": ["x0","a"], "x0": "x0",
                            "edges": [{"u": "x0", "v": "zz", "w": 1}]})"),
                    GraphError);
}

TEST_CASE("dirichlet energy") {
    WeightedGraph e = edge_graph();
    CHECK(dirichlet_energy(e, {0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(dirichlet_energy(e, {0.0, 1.0}) == doctest::Approx(2.0));
    CHECK(dirichlet_energy(e, {1.0, 2.0}) == doctest::Approx(2.0));  // shift invariant
    CHECK(dirichlet_energy(e, {0.0, -1.0}) == doctest::Approx(2.0));  // even

    WeightedGraph t = triangle_graph();
    // edges (0,1),(0,2),(1,2) all weight 1 with f=(0,1,2): 1 + 4 + 1
    CHECK(dirichlet_energy(t, {0.0, 1.0, 2.0}) == doctest::Approx(6.0));
}

TEST_CASE("green function against hand values") {
    // single edge, conductance 2: G = 1/2
    Eigen::MatrixXd ge = green_function(edge_graph());
    REQUIRE(ge.rows() == 1);
    CHECK(ge(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // triangle, unit conductances: Lambda_U = [[2,-1],[-1,2]],
    // inverse = 1/3 [[2,1],[1,2]]
    Eigen::MatrixXd gt = green_function(triangle_graph());
    REQUIRE(gt.rows() == 2);
    CHECK(gt(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(gt(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(gt(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("green function inverts the killed laplacian") {
    WeightedGraph g = cycle4_chord_graph();
    Eigen::MatrixXd lam = laplacian_u(g);
    Eigen::MatrixXd green = green_function(g);
    Eigen::MatrixXd prod = green * lam;
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK((prod - eye).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((green - green.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}
