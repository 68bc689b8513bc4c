#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rklab {

// One real value per vertex, indexed in the graph's declared vertex order.
using FieldVector = std::vector<double>;

struct GraphError : std::runtime_error {
    enum class Kind {
        Disconnected,
        NonpositiveWeight,
        SelfLoop,
        DuplicateEdge,
        MissingX0,
        UnknownVertex,
        BadInput,
    };
    Kind kind;
    GraphError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct Edge {
    int u, v;
    double w;
};

// Finite connected weighted graph with a distinguished vertex x0.
// Vertices carry stable integer indices in declared order; matrices over
// U = V \ {x0} use the declared order with x0 removed.
class WeightedGraph {
public:
    WeightedGraph(std::vector<std::string> labels, const std::string& x0_label,
                  std::vector<Edge> edges);

    static WeightedGraph from_json_file(const std::string& path);
    static WeightedGraph from_json_text(const std::string& text);

    int num_vertices() const { return n_; }
    int x0() const { return x0_; }
    const std::string& label(int v) const { return labels_[v]; }
    int index_of(const std::string& label) const;

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<int, double>>& neighbors(int v) const {
        return adj_[v];
    }
    double weight(int u, int v) const { return w_(u, v); }
    // W_i = sum of conductances at i
    double strength(int v) const { return strength_[v]; }

    // vertices of U in declared order
    const std::vector<int>& u_vertices() const { return u_; }
    // position of v within U, or -1 for x0
    int u_position(int v) const { return u_pos_[v]; }

private:
    int n_;
    int x0_;
    std::vector<std::string> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    Eigen::MatrixXd w_;
    std::vector<double> strength_;
    std::vector<int> u_;
    std::vector<int> u_pos_;
};

// E(f,f) = 1/2 sum_{x,y} W_{x,y} (f(x)-f(y))^2
double dirichlet_energy(const WeightedGraph& g, const FieldVector& f);

// Green function killed outside U: inverse of the Laplacian diag(W_i)-W
// restricted to U, rows/columns in declared U order.
Eigen::MatrixXd green_function(const WeightedGraph& g);

// Laplacian restricted to U (same ordering as green_function).
Eigen::MatrixXd laplacian_u(const WeightedGraph& g);

}  // namespace rklab
