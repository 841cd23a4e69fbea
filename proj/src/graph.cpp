#include "rlab/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace rlab {

namespace {
constexpr int kDistCacheVertexLimit = 20000;
std::atomic<std::uint64_t> g_next_uid{1};
}  // namespace

WeightedGraph::WeightedGraph(std::vector<double> mu, std::vector<Edge> edges, vid basepoint,
                             GraphMetadata meta, double r0)
    : mu_(std::move(mu)),
      edges_(std::move(edges)),
      basepoint_(basepoint),
      meta_(std::move(meta)),
      r0_(r0),
      uid_(g_next_uid.fetch_add(1)) {
    const int n = size();
    if (n == 0) throw std::invalid_argument("graph: no vertices");
    if (basepoint_ < 0 || basepoint_ >= n) throw std::invalid_argument("graph: bad basepoint");

    min_len_ = std::numeric_limits<double>::infinity();
    adj_.assign(n, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        Edge& ed = edges_[e];
        if (ed.a > ed.b) std::swap(ed.a, ed.b);
        if (ed.a < 0 || ed.b >= n || ed.a == ed.b)
            throw std::invalid_argument("graph: bad edge endpoints");
        if (!(ed.w > 0.0) || !(ed.len > 0.0))
            throw std::invalid_argument("graph: nonpositive edge weight/length");
        adj_[ed.a].push_back({ed.b, e});
        adj_[ed.b].push_back({ed.a, e});
        min_len_ = std::min(min_len_, ed.len);
    }
    for (double m : mu_) {
        if (!(m > 0.0)) throw std::invalid_argument("graph: nonpositive vertex measure");
        total_mu_ += m;
    }
    if (edges_.empty() && n > 1) throw std::invalid_argument("graph: disconnected");

    if (n <= kDistCacheVertexLimit) cache_ = std::make_shared<DistCache>();

    std::vector<double> d;
    dijkstra(basepoint_, d);
    for (double v : d)
        if (!std::isfinite(v)) throw std::invalid_argument("graph: disconnected");
    radial_ = std::move(d);
    max_radial_ = *std::max_element(radial_.begin(), radial_.end());
}

void WeightedGraph::dijkstra(vid source, std::vector<double>& dist) const {
    const int n = size();
    dist.assign(n, std::numeric_limits<double>::infinity());
    dist[source] = 0.0;
    using Item = std::pair<double, vid>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [dx, x] = pq.top();
        pq.pop();
        if (dx > dist[x]) continue;
        for (const Incidence& inc : adj_[x]) {
            double nd = dx + edges_[inc.e].len;
            if (nd < dist[inc.y]) {
                dist[inc.y] = nd;
                pq.push({nd, inc.y});
            }
        }
    }
}

std::vector<double> WeightedGraph::distances_from(vid source) const {
    if (source < 0 || source >= size()) throw std::invalid_argument("distances_from: bad vertex");
    if (cache_) {
        {
            std::lock_guard<std::mutex> lk(cache_->mutex);
            auto it = cache_->rows.find(source);
            if (it != cache_->rows.end()) return *it->second;
        }
        auto row = std::make_shared<std::vector<double>>();
        dijkstra(source, *row);
        std::lock_guard<std::mutex> lk(cache_->mutex);
        cache_->rows.emplace(source, row);
        return *row;
    }
    std::vector<double> row;
    dijkstra(source, row);
    return row;
}

double WeightedGraph::distance(vid x, vid y) const {
    if (x == y) return 0.0;
    return distances_from(x)[y];
}

std::vector<std::pair<vid, double>> WeightedGraph::bounded_ball(vid source, double radius) const {
    std::vector<std::pair<vid, double>> out;
    if (radius <= 0.0) return out;
    // Dijkstra pruned at the radius; falls back on a cached row when present.
    std::map<vid, double> dist;
    using Item = std::pair<double, vid>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [dx, x] = pq.top();
        pq.pop();
        auto it = dist.find(x);
        if (it != dist.end() && dx > it->second) continue;
        out.push_back({x, dx});
        for (const Incidence& inc : adj_[x]) {
            double nd = dx + edges_[inc.e].len;
            if (nd >= radius) continue;
            auto jt = dist.find(inc.y);
            if (jt == dist.end() || nd < jt->second) {
                dist[inc.y] = nd;
                pq.push({nd, inc.y});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Ball::contains(vid x) const {
    return std::binary_search(members.begin(), members.end(), x);
}

Ball ball(const WeightedGraph& g, vid center, double radius) {
    if (center < 0 || center >= g.size()) throw std::invalid_argument("ball: bad center");
    if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
    Ball b;
    b.center = center;
    b.radius = radius;
    if (radius > 0.0) {
        auto members = g.bounded_ball(center, radius);
        b.members.reserve(members.size());
        b.member_dist.reserve(members.size());
        for (auto& [v, d] : members) {
            b.members.push_back(v);
            b.member_dist.push_back(d);
        }
    }
    b.anchored = (center == g.basepoint());
    b.remote = radius <= g.radial(center) / 2.0;
    b.admissible = b.remote || (b.anchored && radius <= g.r0());
    return b;
}

double volume(const WeightedGraph& g, const Ball& b) {
    double v = 0.0;
    for (vid x : b.members) v += g.mu(x);
    return v;
}

std::vector<vid> annulus(const WeightedGraph& g, const Ball& b, int j) {
    if (j < 1) throw std::invalid_argument("annulus: j >= 1 required");
    const double lo = std::ldexp(b.radius, j);      // 2^j r
    const double hi = std::ldexp(b.radius, j + 1);  // 2^{j+1} r
    std::vector<vid> out;
    const auto dist = g.distances_from(b.center);
    for (vid x = 0; x < g.size(); ++x)
        if (dist[x] >= lo && dist[x] < hi) out.push_back(x);
    return out;
}

VolumeGrowthReport estimate_volume_growth(const WeightedGraph& g,
                                          const std::vector<VolumeSample>& sample) {
    if (sample.empty()) throw std::invalid_argument("estimate_volume_growth: empty sample");
    VolumeGrowthReport rep;
    rep.doubling_constant = 1.0;
    double max_expo = 0.0, min_expo = std::numeric_limits<double>::infinity();
    // pooled least-squares of log V against log radius
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (const auto& s : sample) {
        if (!(s.r > 0.0) || !(s.R > s.r))
            throw std::invalid_argument("estimate_volume_growth: need 0 < r < R");
        const auto dist = g.distances_from(s.center);
        auto vol_at = [&](double rad) {
            double v = 0.0;
            for (vid x = 0; x < g.size(); ++x)
                if (dist[x] < rad) v += g.mu(x);
            return v;
        };
        const double vr = vol_at(s.r);
        if (vr <= 0.0) continue;  // empty small ball
        const double vR = vol_at(s.R);
        const double v2r = vol_at(2.0 * s.r);
        rep.doubling_constant = std::max(rep.doubling_constant, v2r / vr);
        const double expo = std::log(vR / vr) / std::log(s.R / s.r);
        max_expo = std::max(max_expo, expo);
        min_expo = std::min(min_expo, expo);
        for (double rad : {s.r, s.R}) {
            const double x = std::log(rad), y = std::log(vol_at(rad));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++npts;
        }
        ++rep.samples_used;
    }
    if (rep.samples_used == 0)
        throw std::invalid_argument("estimate_volume_growth: every sampled small ball is empty");
    rep.doubling_exponent = std::max(0.0, max_expo);
    rep.reverse_exponent = std::max(0.0, min_expo);
    const double denom = npts * sxx - sx * sx;
    rep.fit_exponent = denom != 0.0 ? (npts * sxy - sx * sy) / denom : 0.0;
    rep.sample_description = std::to_string(rep.samples_used) + " (center,r,R) triples on " +
                             g.metadata().builder;
    return rep;
}

// ---- builders ----

namespace {

// row-major index of a lattice point
int lat_index(const std::vector<int>& coord, int side) {
    int idx = 0;
    for (int c : coord) idx = idx * side + c;
    return idx;
}

void lattice_into(int n, int side, double spacing, int offset, std::vector<double>& mu,
                  std::vector<Edge>& edges, std::vector<vid>& boundary) {
    const double w = std::pow(spacing, n - 2);
    const double m = std::pow(spacing, n);
    int count = 1;
    for (int i = 0; i < n; ++i) count *= side;
    std::vector<int> coord(n, 0);
    for (int idx = 0; idx < count; ++idx) {
        int rem = idx;
        bool on_boundary = false;
        for (int d = n - 1; d >= 0; --d) {
            coord[d] = rem % side;
            rem /= side;
            if (coord[d] == 0 || coord[d] == side - 1) on_boundary = true;
        }
        mu.push_back(m);
        if (on_boundary) boundary.push_back(offset + idx);
        for (int d = 0; d < n; ++d) {
            if (coord[d] + 1 < side) {
                std::vector<int> nb = coord;
                nb[d] += 1;
                edges.push_back({offset + idx, offset + lat_index(nb, side), w, spacing});
            }
        }
    }
}

int lattice_center_index(int n, int side) {
    std::vector<int> c(n, (side - 1) / 2);
    return lat_index(c, side);
}

}  // namespace

WeightedGraph build_lattice_box(int n, int side, double spacing) {
    if (n < 1) throw std::invalid_argument("build_lattice_box: n >= 1 required");
    if (side < 2) throw std::invalid_argument("build_lattice_box: side >= 2 required");
    if (!(spacing > 0.0)) throw std::invalid_argument("build_lattice_box: spacing > 0 required");
    GraphMetadata meta;
    meta.builder = "lattice_box";
    meta.params = {{"n", double(n)}, {"side", double(side)}, {"spacing", spacing}};
    std::vector<double> mu;
    std::vector<Edge> edges;
    lattice_into(n, side, spacing, 0, mu, edges, meta.boundary);
    return WeightedGraph(std::move(mu), std::move(edges), lattice_center_index(n, side),
                         std::move(meta), 4.0 * spacing);
}

WeightedGraph build_connected_sum(const LatticeSpec& end_a, const LatticeSpec& end_b,
                                  int neck_length) {
    if (end_a.n < 1 || end_b.n < 1 || end_a.side < 2 || end_b.side < 2 ||
        !(end_a.spacing > 0.0) || !(end_b.spacing > 0.0))
        throw std::invalid_argument("build_connected_sum: degenerate end spec");
    if (neck_length < 1) throw std::invalid_argument("build_connected_sum: neck_length >= 1");

    GraphMetadata meta;
    meta.builder = "connected_sum";
    meta.params = {{"n_a", double(end_a.n)},     {"side_a", double(end_a.side)},
                   {"spacing_a", end_a.spacing}, {"n_b", double(end_b.n)},
                   {"side_b", double(end_b.side)}, {"spacing_b", end_b.spacing},
                   {"neck", double(neck_length)}};

    std::vector<double> mu;
    std::vector<Edge> edges;
    lattice_into(end_a.n, end_a.side, end_a.spacing, 0, mu, edges, meta.boundary);
    const int na = static_cast<int>(mu.size());
    lattice_into(end_b.n, end_b.side, end_b.spacing, na, mu, edges, meta.boundary);
    const int nb = static_cast<int>(mu.size()) - na;

    const vid center_a = lattice_center_index(end_a.n, end_a.side);
    const vid center_b = na + lattice_center_index(end_b.n, end_b.side);
    const double sp = end_a.spacing;
    const double w = std::pow(sp, end_a.n - 2);
    const double m = std::pow(sp, end_a.n);

    // neck path: center_a = v_0, v_1 .. v_{neck-1} interior, v_neck = center_b
    vid prev = center_a;
    std::vector<vid> neck_vertices;
    for (int k = 0; k + 1 < neck_length; ++k) {
        vid v = static_cast<vid>(mu.size());
        mu.push_back(m);
        neck_vertices.push_back(v);
        edges.push_back({prev, v, w, sp});
        prev = v;
    }
    edges.push_back({prev, center_b, w, sp});

    meta.end_tag.assign(mu.size(), 0);
    for (int i = 0; i < na; ++i) meta.end_tag[i] = 1;
    for (int i = 0; i < nb; ++i) meta.end_tag[na + i] = -1;
    meta.end_tag[center_a] = 1;
    meta.end_tag[center_b] = -1;

    // basepoint = neck vertex nearest the midpoint; the center of end_a when
    // the neck has no interior vertex
    vid basepoint = center_a;
    if (!neck_vertices.empty()) basepoint = neck_vertices[(neck_length - 1) / 2];

    return WeightedGraph(std::move(mu), std::move(edges), basepoint, std::move(meta),
                         4.0 * neck_length * sp);
}

WeightedGraph build_conic_end(int n, int levels, double cross_scale) {
    if (n < 2) throw std::invalid_argument("build_conic_end: n >= 2 required");
    if (levels < 2) throw std::invalid_argument("build_conic_end: levels >= 2 required");
    if (!(cross_scale > 0.0)) throw std::invalid_argument("build_conic_end: cross_scale > 0");

    GraphMetadata meta;
    meta.builder = "conic_end";
    meta.params = {{"n", double(n)}, {"levels", double(levels)}, {"cross_scale", cross_scale}};

    // level j >= 1 is an (n-1)-torus grid of side s_j ~ cross_scale * j;
    // cross-section diameter then scales linearly in j.
    auto ring_side = [&](int j) {
        return std::max(3, static_cast<int>(std::lround(6.0 * cross_scale * j)));
    };
    const int dim = n - 1;
    auto ring_count = [&](int j) {
        int c = 1;
        for (int d = 0; d < dim; ++d) c *= ring_side(j);
        return c;
    };

    std::vector<double> mu;
    std::vector<Edge> edges;
    mu.push_back(1.0);  // apex
    std::vector<int> level_offset(levels + 1, 0);
    for (int j = 1; j <= levels; ++j) {
        level_offset[j] = static_cast<int>(mu.size());
        const int s = ring_side(j);
        const int cnt = ring_count(j);
        const double circumference = 2.0 * M_PI * cross_scale * j;
        const double cell = circumference / s;  // cross-section grid step
        const double vol = std::pow(cell, dim) * 1.0;
        std::vector<int> coord(dim, 0);
        for (int idx = 0; idx < cnt; ++idx) {
            int rem = idx;
            for (int d = dim - 1; d >= 0; --d) {
                coord[d] = rem % s;
                rem /= s;
            }
            mu.push_back(vol);
            // torus edges within the ring
            for (int d = 0; d < dim; ++d) {
                std::vector<int> nb = coord;
                nb[d] = (nb[d] + 1) % s;
                int nidx = 0;
                for (int c : nb) nidx = nidx * s + c;
                if (nidx != idx)
                    edges.push_back({level_offset[j] + idx, level_offset[j] + nidx,
                                     std::pow(cell, dim - 2) * 1.0, cell});
            }
        }
    }
    // radial edges: map ring j -> ring j+1 by proportional rounding
    for (int j = 1; j < levels; ++j) {
        const int s0 = ring_side(j), s1 = ring_side(j + 1);
        const int cnt = ring_count(j);
        std::vector<int> coord(dim, 0);
        for (int idx = 0; idx < cnt; ++idx) {
            int rem = idx;
            for (int d = dim - 1; d >= 0; --d) {
                coord[d] = rem % s0;
                rem /= s0;
            }
            int nidx = 0;
            for (int d = 0; d < dim; ++d) {
                int c1 = static_cast<int>(std::lround(double(coord[d]) * s1 / s0)) % s1;
                nidx = nidx * s1 + c1;
            }
            const double cell = 2.0 * M_PI * cross_scale * j / s0;
            edges.push_back({level_offset[j] + idx, level_offset[j + 1] + nidx,
                             std::pow(cell, dim - 1), 1.0});
        }
    }
    // apex joins the first ring
    for (int idx = 0; idx < ring_count(1); ++idx)
        edges.push_back({0, level_offset[1] + idx, 1.0 / ring_count(1), 1.0});

    // frontier = outermost ring
    for (int idx = 0; idx < ring_count(levels); ++idx)
        meta.boundary.push_back(level_offset[levels] + idx);

    return WeightedGraph(std::move(mu), std::move(edges), 0, std::move(meta), 4.0);
}

// ---- serialization ----

std::string graph_to_json(const WeightedGraph& g) {
    nlohmann::json j;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (vid x = 0; x < g.size(); ++x)
        verts.push_back({{"id", x}, {"mu", g.mu(x)}, {"r", g.radial(x)}});
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const Edge& e : g.edges())
        edges.push_back({{"a", e.a}, {"b", e.b}, {"w", e.w}, {"len", e.len}});
    j["basepoint"] = g.basepoint();
    nlohmann::json meta;
    meta["builder"] = g.metadata().builder;
    meta["params"] = g.metadata().params;
    meta["boundary"] = g.metadata().boundary;
    if (!g.metadata().end_tag.empty()) meta["end_tag"] = g.metadata().end_tag;
    meta["r0"] = g.r0();
    j["metadata"] = std::move(meta);
    return j.dump(2);
}

WeightedGraph graph_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<double> mu(j["vertices"].size());
    for (const auto& v : j["vertices"]) mu.at(v["id"].get<int>()) = v["mu"].get<double>();
    std::vector<Edge> edges;
    for (const auto& e : j["edges"])
        edges.push_back({e["a"].get<vid>(), e["b"].get<vid>(), e["w"].get<double>(),
                         e["len"].get<double>()});
    GraphMetadata meta;
    const auto& m = j["metadata"];
    meta.builder = m.value("builder", std::string("unknown"));
    if (m.contains("params"))
        meta.params = m["params"].get<std::map<std::string, double>>();
    if (m.contains("boundary")) meta.boundary = m["boundary"].get<std::vector<vid>>();
    if (m.contains("end_tag")) meta.end_tag = m["end_tag"].get<std::vector<int8_t>>();
    return WeightedGraph(std::move(mu), std::move(edges), j["basepoint"].get<vid>(),
                         std::move(meta), m.value("r0", 4.0));
}

}  // namespace rlab
