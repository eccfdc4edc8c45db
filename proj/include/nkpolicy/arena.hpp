#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nkpolicy/landscape.hpp"
#include "nkpolicy/rng.hpp"

namespace nkpolicy {

using AgentId = std::uint32_t;

/// Point in the periodic square box [0, L)^2.
struct Position {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Position&, const Position&) = default;
};

struct Agent {
    AgentId id = 0;
    Position pos;
    BitString string;
    double fitness = 0.0;
};

/// Euclidean distance on the torus of side `box`; each axis displacement is
/// reduced to [-box/2, box/2].
double toroidal_distance(Position a, Position b, double box) noexcept;

/// d0 * exp(alpha * (phi_k / phi_bar - 1)).
double influence_radius(double phi_k, double phi_bar, double alpha, double d0) noexcept;

/// Directed graph; adjacency[k] lists, in increasing id order, the agents k observes.
struct InfluenceNetwork {
    std::vector<std::vector<AgentId>> adjacency;

    std::size_t size() const noexcept { return adjacency.size(); }
    friend bool operator==(const InfluenceNetwork&, const InfluenceNetwork&) = default;
};

/// M agents at fixed positions on a torus, with mutable strings.
///
/// Keeps the mean fitness up to date incrementally and recomputes it from
/// scratch every M string changes. Neighborhood queries go through a uniform
/// grid whose cells are at least d0 wide; radii larger than one cell fall back
/// to a full scan over a precomputed distance matrix.
class Group {
public:
    Group(std::vector<Agent> agents, double rho);

    std::size_t size() const noexcept { return agents_.size(); }
    const Agent& agent(AgentId k) const { return agents_.at(k); }
    std::span<const Agent> agents() const noexcept { return agents_; }

    double box_side() const noexcept { return box_; }
    double density() const noexcept { return rho_; }
    double reference_length() const noexcept { return d0_; }
    double mean_fitness() const noexcept { return mean_fitness_; }

    /// Replaces agent k's string; `fitness` must be the landscape value of `s`.
    void set_string(AgentId k, BitString s, double fitness);

    /// Radius of agent k under policy strength alpha, from current fitness.
    double radius(AgentId k, double alpha) const;

    /// Fills `out` with {j != k : distance(k, j) < d_k}, sorted by id.
    void neighborhood(AgentId k, double alpha, std::vector<AgentId>& out) const;
    std::vector<AgentId> neighborhood(AgentId k, double alpha) const;

    /// Same as neighborhood() but always scans every agent. Reference path for tests.
    std::vector<AgentId> neighborhood_bruteforce(AgentId k, double alpha) const;

private:
    bool covers_torus(AgentId k, double alpha) const;
    std::size_t cell_of(Position p) const noexcept;

    std::vector<Agent> agents_;
    double rho_;
    double box_;
    double d0_;
    double mean_fitness_ = 0.0;
    double log_saturation_ = 0.0;  // ln((L / sqrt 2) / d0)
    std::uint64_t changes_since_recompute_ = 0;

    // Pairwise distances, row-major, kept for groups up to kDenseDistanceLimit agents.
    static constexpr std::size_t kDenseDistanceLimit = 2048;
    std::vector<double> distances_;

    std::size_t cells_per_side_ = 1;
    double cell_width_ = 0.0;
    std::vector<std::vector<AgentId>> cells_;
};

/// Uniform positions in [0, L)^2 and uniform random strings, L = sqrt(M / rho).
///
/// Draw order: for each agent in id order, x then y (two uniform() draws);
/// then for each agent in id order one 64-bit draw whose low N bits are the
/// string.
Group init_group(int group_size, double rho, const NKLandscape& landscape, Rng& rng);
Group init_group(int group_size, double rho, const NKLandscape& landscape, Seed seed);

std::vector<AgentId> influence_neighborhood(const Group& group, AgentId k, double alpha);

InfluenceNetwork build_influence_network(const Group& group, double alpha);

}  // namespace nkpolicy
