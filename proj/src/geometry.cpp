#include "ifk/geometry.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>

namespace ifk {

Site lattice_step(int d) {
    static const Site steps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return steps[((d % 4) + 4) % 4];
}

int lattice_dir(Site s) {
    for (int d = 0; d < 4; ++d)
        if (lattice_step(d) == s) return d;
    throw Error("not a unit lattice step");
}

ShapeSpec ShapeSpec::rectangle(int w, int h) {
    ShapeSpec s;
    s.kind = Kind::Rectangle;
    s.width = w;
    s.height = h;
    return s;
}

ShapeSpec ShapeSpec::disk(double r) {
    ShapeSpec s;
    s.kind = Kind::Disk;
    s.radius = r;
    return s;
}

ShapeSpec ShapeSpec::polyomino(std::vector<Site> cells) {
    ShapeSpec s;
    s.kind = Kind::Polyomino;
    s.cells = std::move(cells);
    return s;
}

cplx line_of(cplx direction) {
    if (std::abs(direction) == 0.0) throw Error("line_of: zero direction");
    return std::sqrt(std::conj(direction / std::abs(direction)));
}

cplx line_of_dir(int dir) {
    static const cplx lines[4] = {line_of({1, 0}), line_of({0, 1}), line_of({-1, 0}),
                                  line_of({0, -1})};
    return lines[((dir % 4) + 4) % 4];
}

int turn(int d1, int d2) {
    int t = ((d2 - d1) % 4 + 4) % 4;
    if (t == 1) return 1;
    if (t == 3) return -1;
    if (t == 0) return 0;
    throw Error("path reverses direction");
}

double winding(const std::vector<int>& dirs, std::size_t from, std::size_t to) {
    if (from > to || to >= dirs.size()) throw Error("winding: index out of range");
    int w = 0;
    for (std::size_t k = from; k < to; ++k) w += turn(dirs[k], dirs[k + 1]);
    return w * kPi / 2;
}

std::string to_string(MedialRole r) {
    switch (r) {
        case MedialRole::Variable: return "variable";
        case MedialRole::FixedOpen: return "fixed_open";
        case MedialRole::FixedClosed: return "fixed_closed";
        case MedialRole::Start: return "start";
        case MedialRole::End: return "end";
        case MedialRole::Outer: return "outer";
    }
    return "?";
}

int Domain::vertex_at(Site s) const {
    auto it = vertex_index_.find(pack(s.x, s.y));
    return it == vertex_index_.end() ? -1 : it->second;
}

int Domain::face_at(Site c) const {
    auto it = face_index_.find(pack(c.x, c.y));
    return it == face_index_.end() ? -1 : it->second;
}

int Domain::medial_at(int u, int v) const {
    auto it = medial_index_.find(pack(u, v));
    return it == medial_index_.end() ? -1 : it->second;
}

int Domain::edge_between(Site s, Site t) const {
    int m = medial_at(s.x + t.x, s.y + t.y);
    return m < 0 ? -1 : medial[m].edge;
}

int Domain::edge_at_position(int m, int pos) const {
    const auto& mv = medial[m];
    for (int e : mv.out)
        if (e >= 0 && medial_edges[e].dir == pos) return e;
    for (int e : mv.in)
        if (e >= 0 && (medial_edges[e].dir + 2) % 4 == pos) return e;
    return -1;
}

void Domain::rebuild_index() {
    vertex_index_.clear();
    face_index_.clear();
    medial_index_.clear();
    for (int i = 0; i < int(vertices.size()); ++i) vertex_index_[pack(vertices[i].x, vertices[i].y)] = i;
    for (int i = 0; i < int(faces.size()); ++i) face_index_[pack(faces[i].cell.x, faces[i].cell.y)] = i;
    for (int i = 0; i < int(medial.size()); ++i) medial_index_[pack(medial[i].u, medial[i].v)] = i;
}

std::uint64_t Domain::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t x) {
        for (int k = 0; k < 8; ++k) {
            h ^= (x >> (8 * k)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(variant == Variant::FK ? 1 : 2);
    std::uint64_t db;
    std::memcpy(&db, &delta, sizeof db);
    mix(db);
    for (auto s : vertices) mix(pack(s.x, s.y));
    for (auto& m : medial) mix(pack(m.u, m.v) ^ (std::uint64_t(m.role) << 60));
    mix(std::uint64_t(a));
    mix(std::uint64_t(b));
    return h;
}

namespace {

using CellSet = std::set<std::pair<int, int>>;

cplx embed_site(double delta, Site s) { return delta * cplx(s.x - s.y, s.x + s.y); }
cplx embed_fine(double delta, int u, int v) { return delta * cplx(u - v, u + v) * 0.5; }

CellSet cells_of(const ShapeSpec& shape, double delta) {
    CellSet cells;
    switch (shape.kind) {
        case ShapeSpec::Kind::Rectangle:
            if (shape.width < 2 || shape.height < 2)
                throw Error("shape too small: a rectangle needs at least 2x2 vertices");
            for (int x = 0; x + 1 < shape.width; ++x)
                for (int y = 0; y + 1 < shape.height; ++y) cells.insert({x, y});
            break;
        case ShapeSpec::Kind::Disk: {
            if (shape.radius <= 0) throw Error("disk radius must be positive");
            int n = int(std::ceil(shape.radius / delta)) + 2;
            auto inside = [&](int x, int y) { return std::abs(embed_site(delta, {x, y})) < shape.radius; };
            for (int x = -n; x <= n; ++x)
                for (int y = -n; y <= n; ++y)
                    if (inside(x, y) && inside(x + 1, y) && inside(x, y + 1) && inside(x + 1, y + 1))
                        cells.insert({x, y});
            break;
        }
        case ShapeSpec::Kind::Polyomino:
            for (auto c : shape.cells) cells.insert({c.x, c.y});
            break;
    }
    if (cells.empty()) throw Error("shape too small: no lattice face fits inside the domain");
    return cells;
}

bool has_cell(const CellSet& cells, int x, int y) { return cells.count({x, y}) > 0; }

// cell on the left of the lattice step from s in direction d
Site left_cell(Site s, int d) {
    switch (d) {
        case 0: return {s.x, s.y};
        case 1: return {s.x - 1, s.y};
        case 2: return {s.x - 1, s.y - 1};
        default: return {s.x, s.y - 1};
    }
}

cplx anchor_point(const Anchor& an, const ShapeSpec& shape, double delta) {
    if (an.corner.empty()) return an.point;
    if (shape.kind != ShapeSpec::Kind::Rectangle) throw Error("named anchors require a rectangle");
    int w = shape.width - 1, h = shape.height - 1;
    Site s;
    if (an.corner == "SW") s = {0, 0};
    else if (an.corner == "SE") s = {w, 0};
    else if (an.corner == "NE") s = {w, h};
    else if (an.corner == "NW") s = {0, h};
    else throw Error("unknown corner '" + an.corner + "'");
    return embed_site(delta, s);
}

template <class Cand>
int snap(const std::vector<Cand>& cands, cplx target, double delta) {
    int best = -1;
    double bd = 0;
    for (int i = 0; i < int(cands.size()); ++i) {
        double d = std::abs(embed_fine(delta, cands[i].u, cands[i].v) - target);
        if (best < 0 || d < bd - 1e-12 ||
            (std::abs(d - bd) <= 1e-12 &&
             std::make_pair(cands[i].u, cands[i].v) < std::make_pair(cands[best].u, cands[best].v))) {
            best = i;
            bd = d;
        }
    }
    return best;
}

struct Candidate {
    int u, v;
    int walk_index;
    Site from, to;   // lattice edge carrying the marked point
};

}  // namespace

Domain build_domain(const ShapeSpec& shape, double delta, Variant variant, const Anchor& a_anchor,
                    const Anchor& b_anchor) {
    if (!(delta > 0)) throw Error("mesh must be positive");
    if ((!a_anchor.corner.empty() && a_anchor.corner == b_anchor.corner) ||
        (a_anchor.corner.empty() && b_anchor.corner.empty() && std::abs(a_anchor.point - b_anchor.point) < 1e-12))
        throw Error("marked points coincide");

    const CellSet cells = cells_of(shape, delta);
    Domain D;
    D.variant = variant;
    D.delta = delta;

    std::set<std::pair<int, int>> vset;
    for (auto [x, y] : cells)
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy) vset.insert({x + dx, y + dy});
    for (auto [x, y] : vset) D.vertices.push_back({x, y});
    D.rebuild_index();

    auto in_v = [&](Site s) { return D.vertex_at(s) >= 0; };

    // primal edges: cell sides; every lattice edge between vertices must be one
    for (int i = 0; i < int(D.vertices.size()); ++i) {
        Site s = D.vertices[i];
        for (int d = 0; d < 2; ++d) {
            Site t = s + lattice_step(d);
            int j = D.vertex_at(t);
            if (j < 0) continue;
            bool side = d == 0 ? (has_cell(cells, s.x, s.y) || has_cell(cells, s.x, s.y - 1))
                               : (has_cell(cells, s.x, s.y) || has_cell(cells, s.x - 1, s.y));
            if (!side) throw Error("domain is not face-connected at this mesh");
            D.edges.push_back({i, j});
        }
    }

    // counterclockwise boundary walk: boundary edges oriented with the domain on their left
    std::map<int, std::vector<int>> bnext;
    std::size_t n_boundary_edges = 0;
    for (auto [i, j] : D.edges) {
        Site s = D.vertices[i], t = D.vertices[j];
        int d = lattice_dir(t - s);
        Site l = left_cell(s, d), r = left_cell(t, (d + 2) % 4);
        bool hl = has_cell(cells, l.x, l.y), hr = has_cell(cells, r.x, r.y);
        if (hl == hr) continue;
        ++n_boundary_edges;
        if (hl) bnext[i].push_back(j);
        else bnext[j].push_back(i);
    }
    for (auto& [v, nx] : bnext)
        if (nx.size() != 1) throw Error("domain boundary touches itself");
    {
        int v0 = bnext.begin()->first, v = v0;
        do {
            D.boundary.push_back(v);
            v = bnext.at(v)[0];
            if (D.boundary.size() > n_boundary_edges) throw Error("boundary walk does not close");
        } while (v != v0);
        if (D.boundary.size() != n_boundary_edges) throw Error("domain is not simply connected");
    }
    const int nb = int(D.boundary.size());
    auto walk_dir = [&](int k) {
        Site s = D.vertices[D.boundary[(k % nb + nb) % nb]];
        Site t = D.vertices[D.boundary[((k + 1) % nb + nb) % nb]];
        return lattice_dir(t - s);
    };

    // candidate marked points
    std::vector<Candidate> bc, ac;
    for (int k = 0; k < nb; ++k) {
        Site B = D.vertices[D.boundary[k]];
        Site south = B + lattice_step(3);
        if (in_v(south)) continue;
        if (variant == Variant::FK && walk_dir(k - 1) != 0) continue;
        bc.push_back({2 * B.x, 2 * B.y - 1, k, B, south});
    }
    for (int k = 0; k < nb; ++k) {
        Site v = D.vertices[D.boundary[k]];
        if (variant == Variant::FK) {
            int r = (walk_dir(k) + 3) % 4;
            Site o = v + lattice_step(r);
            if (!in_v(o)) ac.push_back({v.x + o.x, v.y + o.y, k, v, o});
        } else {
            for (int d = 0; d < 4; ++d) {
                Site o = v + lattice_step(d);
                if (!in_v(o)) ac.push_back({v.x + o.x, v.y + o.y, k, v, o});
            }
        }
    }
    if (bc.empty() || ac.empty()) throw Error("shape too small to host both marked points");
    const Candidate bcand = bc[snap(bc, anchor_point(b_anchor, shape, delta), delta)];
    const Candidate acand = ac[snap(ac, anchor_point(a_anchor, shape, delta), delta)];
    if (acand.u == bcand.u && acand.v == bcand.v) throw Error("marked points coincide");

    const int nv = int(D.vertices.size());
    D.wired.assign(nv, 0);
    D.free_arc.assign(nv, 0);

    std::vector<MedialVertex> med;
    auto add_medial = [&](Site s, Site t, MedialRole role) {
        MedialVertex m;
        m.u = s.x + t.x;
        m.v = s.y + t.y;
        m.s0 = s;
        m.s1 = t;
        m.p0 = D.vertex_at(s);
        m.p1 = D.vertex_at(t);
        m.role = role;
        med.push_back(m);
    };

    std::set<std::pair<int, int>> white;  // face cells admitted by the medial graph
    std::set<std::pair<int, int>> outer;

    if (variant == Variant::FK) {
        const int ib = bcand.walk_index, ja = acand.walk_index;
        std::vector<char> wired_walk_edge(nb, 0);  // walk edge k -> k+1 inside the wired arc
        for (int k = ib;; k = (k + 1) % nb) {
            D.wired[D.boundary[k]] = 1;
            if (k == ja) break;
            wired_walk_edge[k] = 1;
        }
        for (int k = (ja + 1) % nb; k != ib; k = (k + 1) % nb) D.free_arc[D.boundary[k]] = 1;
        int nfree = 0, nwired = 0;
        for (int i = 0; i < nv; ++i) {
            nfree += D.free_arc[i];
            nwired += D.wired[i];
        }
        if (nfree < 1 || nwired < 1) throw Error("shape too small to host both marked points");

        std::set<std::pair<int, int>> fixed_open;
        for (int k = 0; k < nb; ++k)
            if (wired_walk_edge[k]) {
                int i = D.boundary[k], j = D.boundary[(k + 1) % nb];
                fixed_open.insert({std::min(i, j), std::max(i, j)});
            }
        for (auto [i, j] : D.edges)
            add_medial(D.vertices[i], D.vertices[j],
                       fixed_open.count({std::min(i, j), std::max(i, j)}) ? MedialRole::FixedOpen
                                                                          : MedialRole::Variable);
        for (int i = 0; i < nv; ++i) {
            if (!D.free_arc[i]) continue;
            Site s = D.vertices[i];
            for (int d = 0; d < 4; ++d) {
                Site t = s + lattice_step(d);
                if (!in_v(t)) add_medial(s, t, MedialRole::FixedClosed);
            }
            for (int dx = -1; dx <= 0; ++dx)
                for (int dy = -1; dy <= 0; ++dy)
                    if (!has_cell(cells, s.x + dx, s.y + dy)) outer.insert({s.x + dx, s.y + dy});
        }
        add_medial(acand.from, acand.to, MedialRole::Start);
        add_medial(bcand.from, bcand.to, MedialRole::End);
        white = cells;
        white.insert(outer.begin(), outer.end());
    } else {
        for (auto [i, j] : D.edges) add_medial(D.vertices[i], D.vertices[j], MedialRole::Variable);
        for (int i = 0; i < nv; ++i) {
            Site s = D.vertices[i];
            for (int d = 0; d < 4; ++d) {
                Site t = s + lattice_step(d);
                if (!in_v(t)) add_medial(s, t, MedialRole::Outer);
            }
            for (int dx = -1; dx <= 0; ++dx)
                for (int dy = -1; dy <= 0; ++dy) {
                    white.insert({s.x + dx, s.y + dy});
                    if (!has_cell(cells, s.x + dx, s.y + dy)) outer.insert({s.x + dx, s.y + dy});
                }
        }
    }

    std::sort(med.begin(), med.end(), [](const MedialVertex& p, const MedialVertex& q) {
        return std::make_pair(p.u, p.v) < std::make_pair(q.u, q.v);
    });
    D.medial = std::move(med);
    for (auto [x, y] : white) D.faces.push_back({{x, y}, has_cell(cells, x, y)});
    D.rebuild_index();
    D.outer_face.assign(D.faces.size(), 0);
    for (int f = 0; f < int(D.faces.size()); ++f)
        if (variant == Variant::FK && outer.count({D.faces[f].cell.x, D.faces[f].cell.y})) D.outer_face[f] = 1;

    D.medial_of_edge.assign(D.edges.size(), -1);
    for (int e = 0; e < int(D.edges.size()); ++e) {
        Site s = D.vertices[D.edges[e][0]], t = D.vertices[D.edges[e][1]];
        int m = D.medial_at(s.x + t.x, s.y + t.y);
        D.medial[m].edge = e;
        D.medial_of_edge[e] = m;
    }
    D.a = D.medial_at(acand.u, acand.v);
    D.b = D.medial_at(bcand.u, bcand.v);
    if (variant == Variant::Spin) {
        D.medial[D.a].role = MedialRole::Start;
        D.medial[D.b].role = MedialRole::End;
    }

    // medial edges: from m by a diagonal fine step, black face on the left
    for (int m = 0; m < int(D.medial.size()); ++m) {
        const int u = D.medial[m].u, v = D.medial[m].v;
        const bool uodd = (u & 1) != 0;
        for (int sx = -1; sx <= 1; sx += 2)
            for (int sy = -1; sy <= 1; sy += 2) {
                if ((sx * sy < 0) != uodd) continue;
                Site black, cell;
                if (uodd) {
                    black = {(u + sx) / 2, v / 2};
                    cell = {(u - 1) / 2, (v + sy - 1) / 2};
                } else {
                    black = {u / 2, (v + sy) / 2};
                    cell = {(u + sx - 1) / 2, (v - 1) / 2};
                }
                int bi = D.vertex_at(black), wi = D.face_at(cell), t = D.medial_at(u + sx, v + sy);
                if (bi < 0 || wi < 0 || t < 0) continue;
                MedialEdge e;
                e.from = m;
                e.to = t;
                e.black = bi;
                e.white = wi;
                e.dir = (sx > 0) ? (sy > 0 ? 1 : 0) : (sy > 0 ? 2 : 3);
                D.medial_edges.push_back(e);
            }
    }
    for (int e = 0; e < int(D.medial_edges.size()); ++e) {
        auto& me = D.medial_edges[e];
        auto& o = D.medial[me.from].out;
        auto& in = D.medial[me.to].in;
        (o[0] < 0 ? o[0] : o[1]) = e;
        (in[0] < 0 ? in[0] : in[1]) = e;
    }

    if (variant == Variant::FK) {
        for (int m = 0; m < int(D.medial.size()); ++m) {
            const auto& mv = D.medial[m];
            int nin = (mv.in[0] >= 0) + (mv.in[1] >= 0), nout = (mv.out[0] >= 0) + (mv.out[1] >= 0);
            bool ok = false;
            switch (mv.role) {
                case MedialRole::Variable: ok = nin == 2 && nout == 2; break;
                case MedialRole::FixedOpen:
                case MedialRole::FixedClosed: ok = nin == 1 && nout == 1; break;
                case MedialRole::Start: ok = nin == 0 && nout == 1; break;
                case MedialRole::End: ok = nin == 1 && nout == 0; break;
                default: break;
            }
            if (!ok) throw Error("irregular boundary near medial vertex (" + std::to_string(mv.u) + "," +
                                 std::to_string(mv.v) + "), role " + to_string(mv.role));
        }
        D.start_edge = D.medial[D.a].out[0];
        D.end_edge = D.medial[D.b].in[0];
        if (D.medial_edges[D.end_edge].dir != 0) throw Error("last edge does not point east");
        for (int m = 0; m < int(D.medial.size()); ++m)
            if (D.medial[m].role == MedialRole::Variable) {
                D.medial[m].var = int(D.var_medial.size());
                D.var_medial.push_back(m);
            }
    }

    const int ne = int(D.medial_edges.size());
    D.next_open.assign(ne, -1);
    D.next_closed.assign(ne, -1);
    for (int e = 0; e < ne; ++e) {
        const auto& me = D.medial_edges[e];
        for (int o : D.medial[me.to].out) {
            if (o < 0) continue;
            if (D.medial_edges[o].white == me.white) D.next_open[e] = o;
            if (D.medial_edges[o].black == me.black) D.next_closed[e] = o;
        }
        const auto role = D.medial[me.to].role;
        if ((role == MedialRole::FixedOpen && D.next_open[e] < 0) ||
            (role == MedialRole::FixedClosed && D.next_closed[e] < 0))
            throw Error("fixed boundary vertex does not reflect the exploration");
    }
    return D;
}

}  // namespace ifk
