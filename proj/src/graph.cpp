#include "rklab/graph.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace rklab {

WeightedGraph::WeightedGraph(std::vector<std::string> labels,
                             const std::string& x0_label,
                             std::vector<Edge> edges)
    : labels_(std::move(labels)), edges_(std::move(edges)) {
    n_ = static_cast<int>(labels_.size());
    if (n_ == 0) throw GraphError(GraphError::Kind::BadInput, "empty vertex list");

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < n_; ++i) {
        if (!index.emplace(labels_[i], i).second)
            throw GraphError(GraphError::Kind::BadInput,
                             "duplicate vertex id: " + labels_[i]);
    }
    auto it = index.find(x0_label);
    if (it == index.end())
        throw GraphError(GraphError::Kind::MissingX0,
                         "x0 not in vertex list: " + x0_label);
    x0_ = it->second;

    w_ = Eigen::MatrixXd::Zero(n_, n_);
    adj_.assign(n_, {});
    std::unordered_set<long long> seen;
    for (const Edge& e : edges_) {
        if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
            throw GraphError(GraphError::Kind::UnknownVertex, "edge endpoint out of range");
        if (e.u == e.v)
            throw GraphError(GraphError::Kind::SelfLoop,
                             "self-loop at " + labels_[e.u]);
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw GraphError(GraphError::Kind::NonpositiveWeight,
                             "conductance must be finite and positive on edge (" +
                                 labels_[e.u] + "," + labels_[e.v] + ")");
        long long key = static_cast<long long>(std::min(e.u, e.v)) * n_ +
                        std::max(e.u, e.v);
        if (!seen.insert(key).second)
            throw GraphError(GraphError::Kind::DuplicateEdge,
                             "duplicate edge (" + labels_[e.u] + "," + labels_[e.v] + ")");
        w_(e.u, e.v) = e.w;
        w_(e.v, e.u) = e.w;
        adj_[e.u].emplace_back(e.v, e.w);
        adj_[e.v].emplace_back(e.u, e.w);
    }

    strength_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (auto& [j, w] : adj_[i]) strength_[i] += w;

    // connectivity (BFS from x0)
    std::vector<char> vis(n_, 0);
    std::vector<int> stack{x0_};
    vis[x0_] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto& [j, w] : adj_[v])
            if (!vis[j]) {
                vis[j] = 1;
                ++count;
                stack.push_back(j);
            }
    }
    if (count != n_)
        throw GraphError(GraphError::Kind::Disconnected, "graph is not connected");

    u_pos_.assign(n_, -1);
    for (int i = 0; i < n_; ++i) {
        if (i == x0_) continue;
        u_pos_[i] = static_cast<int>(u_.size());
        u_.push_back(i);
    }
}

int WeightedGraph::index_of(const std::string& label) const {
    for (int i = 0; i < n_; ++i)
        if (labels_[i] == label) return i;
    throw GraphError(GraphError::Kind::UnknownVertex, "unknown vertex: " + label);
}

namespace {
std::string id_to_string(const nlohmann::json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw GraphError(GraphError::Kind::BadInput, "vertex id must be string or integer");
}
}  // namespace

WeightedGraph WeightedGraph::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw GraphError(GraphError::Kind::BadInput,
                         std::string("graph JSON parse error: ") + e.what());
    }
    if (!j.contains("vertices") || !j.contains("x0") || !j.contains("edges"))
        throw GraphError(GraphError::Kind::BadInput,
                         "graph JSON requires vertices, x0, edges");

    std::vector<std::string> labels;
    for (const auto& v : j["vertices"]) labels.push_back(id_to_string(v));
    std::string x0 = id_to_string(j["x0"]);

    std::unordered_map<std::string, int> index;
    for (size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);

    std::vector<Edge> edges;
    for (const auto& e : j["edges"]) {
        std::string us = id_to_string(e.at("u"));
        std::string vs = id_to_string(e.at("v"));
        auto iu = index.find(us);
        auto iv = index.find(vs);
        if (iu == index.end() || iv == index.end())
            throw GraphError(GraphError::Kind::UnknownVertex,
                             "edge endpoint not declared: " + us + "," + vs);
        if (!e.at("w").is_number())
            throw GraphError(GraphError::Kind::BadInput, "edge weight must be a number");
        edges.push_back({iu->second, iv->second, e.at("w").get<double>()});
    }
    return WeightedGraph(std::move(labels), x0, std::move(edges));
}

WeightedGraph WeightedGraph::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw GraphError(GraphError::Kind::BadInput, "cannot open graph file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

double dirichlet_energy(const WeightedGraph& g, const FieldVector& f) {
    if (static_cast<int>(f.size()) != g.num_vertices())
        throw std::invalid_argument("field size does not match vertex count");
    double e = 0.0;
    for (const Edge& ed : g.edges()) {
        double d = f[ed.u] - f[ed.v];
        e += ed.w * d * d;
    }
    return e;
}

Eigen::MatrixXd laplacian_u(const WeightedGraph& g) {
    const auto& u = g.u_vertices();
    int m = static_cast<int>(u.size());
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        lam(a, a) = g.strength(u[a]);
        for (int b = 0; b < m; ++b)
            if (a != b) lam(a, b) = -g.weight(u[a], u[b]);
    }
    return lam;
}

Eigen::MatrixXd green_function(const WeightedGraph& g) {
    Eigen::MatrixXd lam = laplacian_u(g);
    Eigen::LLT<Eigen::MatrixXd> llt(lam);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("killed Laplacian is not positive definite");
    return llt.solve(Eigen::MatrixXd::Identity(lam.rows(), lam.cols()));
}

}  // namespace rklab
