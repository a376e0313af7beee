#pragma once

#include <array>
#include <vector>

#include "ifk/common.hpp"

namespace ifk {

// Finite simple graph with optional embedding, used by the spin and FK models.
struct Graph {
    int n = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<cplx> pos;

    int add_vertex(cplx p = {}) {
        pos.push_back(p);
        return n++;
    }
    void add_edge(int u, int v) { edges.push_back({u, v}); }
    std::vector<std::vector<int>> adjacency() const;   // vertex -> incident edge ids
    std::vector<std::vector<int>> neighbours() const;  // vertex -> neighbour vertices
};

// w x h grid, vertex (x,y) has index x + w*y
Graph grid_graph(int w, int h, double spacing = 1.0);
// w x h torus with periodic boundary
Graph torus_graph(int w, int h);
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);

// vertices of the outer ring of a w x h grid
std::vector<int> grid_ring(int w, int h);

class UnionFind {
public:
    explicit UnionFind(int n = 0) { reset(n); }
    void reset(int n) {
        parent_.resize(n);
        size_.assign(n, 1);
        for (int i = 0; i < n; ++i) parent_[i] = i;
        components_ = n;
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }
    int components() const { return components_; }
    int size_of(int x) { return size_[find(x)]; }

private:
    std::vector<int> parent_, size_;
    int components_ = 0;
};

}  // namespace ifk
