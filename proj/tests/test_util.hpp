#pragma once

#include <vector>

#include "rklab/graph.hpp"

namespace rktest {

// Reference graphs shared across the test suite. x0 is always vertex 0.

// single edge x0 -- a with conductance 2
inline rklab::WeightedGraph edge_graph() {
    return rklab::WeightedGraph({"x0", "a"}, "x0", {{0, 1, 2.0}});
}

// triangle on {x0, a, b}, all conductances 1
inline rklab::WeightedGraph triangle_graph() {
    return rklab::WeightedGraph({"x0", "a", "b"}, "x0",
                                {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

// 4-cycle x0-a-b-c-x0 with mixed conductances plus chord a-c
inline rklab::WeightedGraph cycle4_chord_graph() {
    return rklab::WeightedGraph(
        {"x0", "a", "b", "c"}, "x0",
        {{0, 1, 0.5}, {1, 2, 1.0}, {2, 3, 2.0}, {3, 0, 1.0}, {1, 3, 0.5}});
}

}  // namespace rktest
