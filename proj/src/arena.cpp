#include "nkpolicy/arena.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

double toroidal_distance(Position a, Position b, double box) noexcept {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (dx > 0.5 * box) dx = box - dx;
    if (dy > 0.5 * box) dy = box - dy;
    return std::sqrt(dx * dx + dy * dy);
}

double influence_radius(double phi_k, double phi_bar, double alpha, double d0) noexcept {
    return d0 * std::exp(alpha * (phi_k / phi_bar - 1.0));
}

Group::Group(std::vector<Agent> agents, double rho) : agents_(std::move(agents)), rho_(rho) {
    if (agents_.empty()) throw ParameterError("group needs at least one agent");
    if (!(rho > 0.0)) throw ParameterError(fmt::format("density must be positive, got {}", rho));
    const double m = static_cast<double>(agents_.size());
    box_ = std::sqrt(m / rho_);
    d0_ = 1.0 / std::sqrt(rho_);
    log_saturation_ = std::log(box_ / std::sqrt(2.0) / d0_);

    double sum = 0.0;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        Agent& a = agents_[i];
        if (a.id != i) throw ParameterError(fmt::format("agent at index {} has id {}", i, a.id));
        if (!(a.pos.x >= 0.0 && a.pos.x < box_ && a.pos.y >= 0.0 && a.pos.y < box_)) {
            throw ParameterError(fmt::format("agent {} position ({}, {}) outside [0, {})^2", i, a.pos.x, a.pos.y, box_));
        }
        sum += a.fitness;
    }
    mean_fitness_ = sum / m;

    if (agents_.size() <= kDenseDistanceLimit) {
        const std::size_t m_size = agents_.size();
        distances_.assign(m_size * m_size, 0.0);
        for (std::size_t i = 0; i < m_size; ++i) {
            for (std::size_t j = i + 1; j < m_size; ++j) {
                const double d = toroidal_distance(agents_[i].pos, agents_[j].pos, box_);
                distances_[i * m_size + j] = d;
                distances_[j * m_size + i] = d;
            }
        }
    }

    cells_per_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(box_ / d0_)));
    cell_width_ = box_ / static_cast<double>(cells_per_side_);
    cells_.resize(cells_per_side_ * cells_per_side_);
    for (const Agent& a : agents_) cells_[cell_of(a.pos)].push_back(a.id);
}

std::size_t Group::cell_of(Position p) const noexcept {
    const auto cx = std::min(cells_per_side_ - 1, static_cast<std::size_t>(p.x / cell_width_));
    const auto cy = std::min(cells_per_side_ - 1, static_cast<std::size_t>(p.y / cell_width_));
    return cy * cells_per_side_ + cx;
}

void Group::set_string(AgentId k, BitString s, double fitness) {
    Agent& a = agents_.at(k);
    const double old = a.fitness;
    a.string = s;
    a.fitness = fitness;
    if (++changes_since_recompute_ >= agents_.size()) {
        double sum = 0.0;
        for (const Agent& b : agents_) sum += b.fitness;
        mean_fitness_ = sum / static_cast<double>(agents_.size());
        changes_since_recompute_ = 0;
    } else {
        mean_fitness_ += (fitness - old) / static_cast<double>(agents_.size());
    }
}

bool Group::covers_torus(AgentId k, double alpha) const {
    return alpha * (agents_[k].fitness / mean_fitness_ - 1.0) > log_saturation_;
}

double Group::radius(AgentId k, double alpha) const {
    if (covers_torus(k, alpha)) return box_ / std::sqrt(2.0);
    return influence_radius(agents_.at(k).fitness, mean_fitness_, alpha, d0_);
}

void Group::neighborhood(AgentId k, double alpha, std::vector<AgentId>& out) const {
    out.clear();
    const Agent& self = agents_.at(k);
    if (covers_torus(k, alpha)) {
        for (const Agent& a : agents_) {
            if (a.id != k) out.push_back(a.id);
        }
        return;
    }
    const double dk = influence_radius(self.fitness, mean_fitness_, alpha, d0_);

    if (cells_per_side_ >= 3 && dk * (1.0 + 1e-12) < cell_width_) {
        const std::size_t home = cell_of(self.pos);
        const std::size_t hx = home % cells_per_side_;
        const std::size_t hy = home / cells_per_side_;
        for (std::size_t oy = 0; oy < 3; ++oy) {
            const std::size_t cy = (hy + cells_per_side_ + oy - 1) % cells_per_side_;
            for (std::size_t ox = 0; ox < 3; ++ox) {
                const std::size_t cx = (hx + cells_per_side_ + ox - 1) % cells_per_side_;
                for (AgentId j : cells_[cy * cells_per_side_ + cx]) {
                    if (j != k && toroidal_distance(self.pos, agents_[j].pos, box_) < dk) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return;
    }

    if (!distances_.empty()) {
        const double* row = distances_.data() + static_cast<std::size_t>(k) * agents_.size();
        for (AgentId j = 0; j < agents_.size(); ++j) {
            if (row[j] < dk && j != k) out.push_back(j);
        }
        return;
    }
    for (const Agent& a : agents_) {
        if (a.id != k && toroidal_distance(self.pos, a.pos, box_) < dk) out.push_back(a.id);
    }
}

std::vector<AgentId> Group::neighborhood(AgentId k, double alpha) const {
    std::vector<AgentId> out;
    neighborhood(k, alpha, out);
    return out;
}

std::vector<AgentId> Group::neighborhood_bruteforce(AgentId k, double alpha) const {
    std::vector<AgentId> out;
    const Agent& self = agents_.at(k);
    const bool all = covers_torus(k, alpha);
    const double dk = all ? std::numeric_limits<double>::infinity()
                          : influence_radius(self.fitness, mean_fitness_, alpha, d0_);
    for (const Agent& a : agents_) {
        if (a.id != k && toroidal_distance(self.pos, a.pos, box_) < dk) out.push_back(a.id);
    }
    return out;
}

Group init_group(int group_size, double rho, const NKLandscape& landscape, Rng& rng) {
    if (group_size < 1) throw ParameterError(fmt::format("group size must be >= 1, got {}", group_size));
    if (!(rho > 0.0)) throw ParameterError(fmt::format("density must be positive, got {}", rho));
    const double box = std::sqrt(static_cast<double>(group_size) / rho);
    std::vector<Agent> agents(static_cast<std::size_t>(group_size));
    for (std::size_t i = 0; i < agents.size(); ++i) {
        agents[i].id = static_cast<AgentId>(i);
        agents[i].pos.x = rng.uniform() * box;
        agents[i].pos.y = rng.uniform() * box;
        // uniform() * box can round up to box itself.
        if (agents[i].pos.x >= box) agents[i].pos.x = 0.0;
        if (agents[i].pos.y >= box) agents[i].pos.y = 0.0;
    }
    const std::uint64_t mask = (std::uint64_t{1} << landscape.n()) - 1;
    for (Agent& a : agents) {
        const auto bits = static_cast<std::uint32_t>(rng.next_u64() & mask);
        a.string = BitString(landscape.n(), bits);
        a.fitness = landscape.fitness_of(bits);
    }
    return Group(std::move(agents), rho);
}

Group init_group(int group_size, double rho, const NKLandscape& landscape, Seed seed) {
    Rng rng(seed);
    return init_group(group_size, rho, landscape, rng);
}

std::vector<AgentId> influence_neighborhood(const Group& group, AgentId k, double alpha) {
    return group.neighborhood(k, alpha);
}

InfluenceNetwork build_influence_network(const Group& group, double alpha) {
    InfluenceNetwork net;
    net.adjacency.resize(group.size());
    for (AgentId k = 0; k < group.size(); ++k) group.neighborhood(k, alpha, net.adjacency[k]);
    return net;
}

}  // namespace nkpolicy
