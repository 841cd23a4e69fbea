#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace rlab {

using vid = int;

struct Edge {
    vid a = -1;      // endpoints, a < b
    vid b = -1;
    double w = 1.0;  // conductance
    double len = 1.0;
};

/// Per-vertex metadata recorded by the builders.
struct GraphMetadata {
    std::string builder;
    std::map<std::string, double> params;
    std::vector<vid> boundary;     // truncation frontier of the discretized model
    std::vector<int8_t> end_tag;   // +1 / -1 per end, 0 on neck; empty if single-ended
};

/// Discrete model manifold: positive vertex measure mu, weighted edges with
/// conductance w and length len, shortest-path metric, basepoint o.
/// Immutable after construction; distance queries are internally synchronized.
class WeightedGraph {
public:
    WeightedGraph(std::vector<double> mu, std::vector<Edge> edges, vid basepoint,
                  GraphMetadata meta, double r0);

    int size() const { return static_cast<int>(mu_.size()); }
    double mu(vid x) const { return mu_[x]; }
    const std::vector<double>& mu() const { return mu_; }
    double total_measure() const { return total_mu_; }
    const std::vector<Edge>& edges() const { return edges_; }
    vid basepoint() const { return basepoint_; }
    const GraphMetadata& metadata() const { return meta_; }
    std::uint64_t uid() const { return uid_; }

    /// Radius of the anchored ball B0 used for admissibility classification.
    double r0() const { return r0_; }
    /// Config knob; adjust before sharing the graph across threads.
    void set_r0(double r0) { r0_ = r0; }

    /// r(x) = d(x, o).
    double radial(vid x) const { return radial_[x]; }
    const std::vector<double>& radial() const { return radial_; }
    double max_radial() const { return max_radial_; }

    /// Incident (neighbor, edge index) pairs.
    struct Incidence { vid y; int e; };
    const std::vector<Incidence>& neighbors(vid x) const { return adj_[x]; }

    /// Single-source shortest-path distances with edge lengths.
    /// Rows are memoized for graphs up to the cache limit (20k vertices).
    std::vector<double> distances_from(vid source) const;
    double distance(vid x, vid y) const;

    /// Same computation without touching the row cache (bulk sweeps).
    void distances_into(vid source, std::vector<double>& dist) const { dijkstra(source, dist); }

    /// Smallest edge length, used as a metric resolution scale.
    double min_edge_len() const { return min_len_; }

    /// Vertices within distance `radius` of `source` (open ball), with their
    /// distances; avoids a full sweep when the ball is small.
    std::vector<std::pair<vid, double>> bounded_ball(vid source, double radius) const;

private:
    void dijkstra(vid source, std::vector<double>& dist) const;

    std::vector<double> mu_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adj_;
    vid basepoint_;
    GraphMetadata meta_;
    double r0_;
    double total_mu_ = 0.0;
    double min_len_ = 0.0;
    std::vector<double> radial_;
    double max_radial_ = 0.0;
    std::uint64_t uid_;

    struct DistCache {
        std::mutex mutex;
        std::map<vid, std::shared_ptr<const std::vector<double>>> rows;
    };
    std::shared_ptr<DistCache> cache_;  // null when the graph is too large

};

/// Open metric ball with resolved member set and Def-1.1 classification.
struct Ball {
    vid center = -1;
    double radius = 0.0;
    std::vector<vid> members;             // sorted
    std::vector<double> member_dist;      // aligned with members
    bool remote = false;                  // radius <= r(center)/2
    bool anchored = false;                // center == basepoint
    bool admissible = false;              // remote, or anchored with radius <= r0

    bool contains(vid x) const;
};

struct VolumeGrowthReport {
    double doubling_constant = 1.0;  // best measured C in V(x,2r) <= C V(x,r)
    double doubling_exponent = 0.0;  // max per-sample exponent (VD)
    double reverse_exponent = 0.0;   // min per-sample exponent (RD)
    double fit_exponent = 0.0;       // least-squares slope of log V vs log r
    int samples_used = 0;
    std::string sample_description;
};

struct VolumeSample {
    vid center;
    double r;
    double R;
};

// ---- model_geometry operations ----

struct LatticeSpec {
    int n = 1;         // dimension
    int side = 2;      // vertices per axis
    double spacing = 1.0;
};

/// Integer-lattice box discretizing R^n. Conductances w = spacing^{n-2},
/// mu = spacing^n, len = spacing, so the Dirichlet form discretizes
/// the continuum energy. Basepoint = center vertex; row-major vertex order.
WeightedGraph build_lattice_box(int n, int side, double spacing = 1.0);

/// Two lattice boxes joined by a neck path of `neck_length` edges between
/// their centers; models R^n # R^n. Basepoint = midpoint of the neck.
WeightedGraph build_connected_sum(const LatticeSpec& end_a, const LatticeSpec& end_b,
                                  int neck_length);

/// Discrete cone: apex plus radial levels carrying (n-1)-dimensional
/// cross-sections whose diameter grows linearly; volume growth exponent ~ n.
WeightedGraph build_conic_end(int n, int levels, double cross_scale);

/// Open geodesic ball with Def-1.1 classification against the graph's r0.
Ball ball(const WeightedGraph& g, vid center, double radius);

/// V(B) = sum of mu over members.
double volume(const WeightedGraph& g, const Ball& b);

/// C_j(B) = 2^{j+1}B \ 2^j B, j >= 1.
std::vector<vid> annulus(const WeightedGraph& g, const Ball& b, int j);

/// Measures doubling constant and growth exponents over the sample.
/// Pairs whose small ball is empty are ignored; throws if all are.
VolumeGrowthReport estimate_volume_growth(const WeightedGraph& g,
                                          const std::vector<VolumeSample>& sample);

// ---- serialization (graph JSON schema) ----
std::string graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const std::string& text);

}  // namespace rlab
