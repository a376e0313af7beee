#include "ifk/graph.hpp"

namespace ifk {

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (int e = 0; e < int(edges.size()); ++e) {
        adj[edges[e][0]].push_back(e);
        adj[edges[e][1]].push_back(e);
    }
    return adj;
}

std::vector<std::vector<int>> Graph::neighbours() const {
    std::vector<std::vector<int>> nb(n);
    for (auto [u, v] : edges) {
        nb[u].push_back(v);
        nb[v].push_back(u);
    }
    return nb;
}

Graph grid_graph(int w, int h, double spacing) {
    Graph g;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) g.add_vertex(spacing * cplx(x, y));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) g.add_edge(x + w * y, x + 1 + w * y);
            if (y + 1 < h) g.add_edge(x + w * y, x + w * (y + 1));
        }
    return g;
}

Graph torus_graph(int w, int h) {
    Graph g;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) g.add_vertex(cplx(x, y));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            g.add_edge(x + w * y, (x + 1) % w + w * y);
            g.add_edge(x + w * y, x + w * ((y + 1) % h));
        }
    return g;
}

Graph path_graph(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex(cplx(i, 0));
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

Graph cycle_graph(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex(std::polar(1.0, 2 * kPi * i / n));
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

Graph complete_graph(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex(std::polar(1.0, 2 * kPi * i / n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

std::vector<int> grid_ring(int w, int h) {
    std::vector<int> r;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) r.push_back(x + w * y);
    return r;
}

}  // namespace ifk
