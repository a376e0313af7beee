#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "ifk/common.hpp"

namespace ifk {

// Integer point of the primal lattice (vertices) or of the cell grid (faces).
struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Site a, Site b) { return !(a == b); }
    friend Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
    friend Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }
};

// Lattice directions in the primal frame: 0:+x 1:+y 2:-x 3:-y (counterclockwise).
Site lattice_step(int d);
int lattice_dir(Site step);

inline std::uint64_t pack(int x, int y) {
    return (std::uint64_t(std::uint32_t(x)) << 32) | std::uint32_t(y);
}

enum class Variant { Spin, FK };

// Role of a medial vertex (midpoint of a lattice edge).
//   Variable     edge of the domain carrying a random state
//   FixedOpen    boundary edge of the wired arc
//   FixedClosed  edge leaving a free-arc vertex towards the outside
//   Start / End  the marked points a and b
//   Outer        spin domains: edge leaving the domain
enum class MedialRole : std::uint8_t { Variable, FixedOpen, FixedClosed, Start, End, Outer };

struct MedialVertex {
    int u = 0, v = 0;   // fine coordinates
    Site s0, s1;        // lattice endpoints, s0 inside the domain
    int p0 = -1;        // primal vertex index of s0
    int p1 = -1;        // primal vertex index of s1, -1 if outside
    int edge = -1;      // primal edge index, -1 if not an edge of the domain
    int var = -1;       // index of the random state, -1 if none
    MedialRole role = MedialRole::Variable;
    std::array<int, 2> in{-1, -1};
    std::array<int, 2> out{-1, -1};
    int degree() const {
        return (in[0] >= 0) + (in[1] >= 0) + (out[0] >= 0) + (out[1] >= 0);
    }
};

// Medial edges point in embedded directions 0:E 1:N 2:W 3:S and keep the
// black face on their left.
struct MedialEdge {
    int from = -1, to = -1;
    int black = -1;     // primal vertex index
    int white = -1;     // face index
    int dir = 0;
    bool active = true;
};

struct WhiteFace {
    Site cell;          // lower-left corner in the primal frame
    bool inner = false; // all four sides are edges of the domain
};

struct ShapeSpec {
    enum class Kind { Rectangle, Disk, Polyomino };
    Kind kind = Kind::Rectangle;
    int width = 0;      // rectangle: number of vertices along x
    int height = 0;     // rectangle: number of vertices along y
    double radius = 1.0;
    std::vector<Site> cells;

    static ShapeSpec rectangle(int w, int h);
    static ShapeSpec disk(double r);
    static ShapeSpec polyomino(std::vector<Site> cells);
};

// Boundary anchor: a named rectangle corner (NW, NE, SW, SE, in the primal
// frame) or an embedded point.
struct Anchor {
    std::string corner;
    cplx point{0.0, 0.0};
    static Anchor at(cplx z) { return Anchor{"", z}; }
    static Anchor named(std::string c) { return Anchor{std::move(c), {}}; }
};

class Domain {
public:
    Variant variant = Variant::FK;
    double delta = 1.0;

    std::vector<Site> vertices;
    std::vector<std::array<int, 2>> edges;
    std::vector<WhiteFace> faces;
    std::vector<MedialVertex> medial;
    std::vector<MedialEdge> medial_edges;

    std::vector<int> boundary;      // counterclockwise boundary walk (vertex indices)
    std::vector<char> wired;        // FK: vertex on the wired arc
    std::vector<char> free_arc;     // FK: vertex on the free arc
    std::vector<char> outer_face;   // FK: face on the dual arc next to the free arc

    int a = -1;                     // medial vertex ids of the marked points
    int b = -1;
    int start_edge = -1;            // first edge of the exploration path
    int end_edge = -1;              // last edge (points east into b)

    std::vector<int> var_medial;    // random state -> medial vertex
    std::vector<int> medial_of_edge;
    std::vector<int> next_open;     // successor of a medial edge when its head is open
    std::vector<int> next_closed;

    int num_vars() const { return int(var_medial.size()); }
    int vertex_at(Site s) const;
    int face_at(Site cell) const;
    int medial_at(int u, int v) const;
    int edge_between(Site s, Site t) const;

    cplx embed(double u, double v) const { return delta * cplx(u - v, u + v) * 0.5; }
    cplx vertex_pos(int i) const { return embed(2 * vertices[i].x, 2 * vertices[i].y); }
    cplx face_pos(int f) const { return embed(2 * faces[f].cell.x + 1, 2 * faces[f].cell.y + 1); }
    cplx medial_pos(int m) const { return embed(medial[m].u, medial[m].v); }
    // midpoint of a medial edge
    cplx edge_pos(int e) const { return 0.5 * (medial_pos(medial_edges[e].from) + medial_pos(medial_edges[e].to)); }

    // interior medial vertex: two incoming and two outgoing edges
    bool is_full(int m) const { return medial[m].degree() == 4; }
    // medial edge incident to m at geographic position pos (0:E 1:N 2:W 3:S), -1 if none
    int edge_at_position(int m, int pos) const;

    std::uint64_t hash() const;
    void rebuild_index();

private:
    std::unordered_map<std::uint64_t, int> vertex_index_, face_index_, medial_index_;
};

Domain build_domain(const ShapeSpec& shape, double delta, Variant variant, const Anchor& a,
                    const Anchor& b);

// Unit representative of the line through the origin and sqrt(conj(d)).
cplx line_of(cplx direction);
// Line of a medial edge pointing in embedded direction dir (0:E 1:N 2:W 3:S).
cplx line_of_dir(int dir);
// Orthogonal projection of f on the line spanned by the unit number u.
inline cplx project(cplx f, cplx u) { return 0.5 * (f + u * u * std::conj(f)); }
inline cplx dir_unit(int dir) {
    static const cplx units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return units[((dir % 4) + 4) % 4];
}

// +1 for a left turn, -1 for a right turn, 0 when going straight.
int turn(int d1, int d2);
// Sum of the turns between path edges from and to (inclusive indices), in radians.
double winding(const std::vector<int>& dirs, std::size_t from, std::size_t to);

std::string to_string(MedialRole r);

}  // namespace ifk
