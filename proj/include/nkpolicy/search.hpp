#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nkpolicy/arena.hpp"
#include "nkpolicy/landscape.hpp"
#include "nkpolicy/rng.hpp"

namespace nkpolicy {

struct SearchParams {
    int group_size = 1;
    /// Policy strength: > 0 elitist, 0 egalitarian, < 0 welfarist.
    double alpha = 0.0;
    double imitation_prob = 0.5;
    double density = 1.0;
    Seed seed = 0;
    /// Update cap; 0 selects 10^4 * 2^N.
    std::uint64_t max_updates = 0;
};

void validate(const SearchParams& params);

enum class UpdateAction { random_flip, imitation_flip };

struct UpdateOutcome {
    AgentId target = 0;
    UpdateAction action = UpdateAction::random_flip;
    int flipped_bit = 0;
    std::optional<AgentId> model;
    bool found_global = false;
};

/// Landscape plus what every run on it needs: the fitness of all 2^N strings
/// and the global maximum. Immutable; share one per landscape across runs.
class SearchContext {
public:
    explicit SearchContext(const NKLandscape& landscape);

    const NKLandscape& landscape() const noexcept { return *landscape_; }
    const GlobalMaximum& global() const noexcept { return global_; }
    double fitness_of(std::uint32_t bits) const noexcept { return fitness_[bits]; }

private:
    const NKLandscape* landscape_;
    std::vector<double> fitness_;
    GlobalMaximum global_;
};

struct SearchResult {
    /// Halting time in units of M updates.
    double t_star = 0.0;
    /// Rescaled cost: updates / 2^N.
    double cost = 0.0;
    std::uint64_t updates = 0;
    bool timed_out = false;
    std::optional<AgentId> winner;
    double winner_initial_fitness = 0.0;
    double initial_mean_fitness = 0.0;
    /// Neighborhood sizes just before the final flip: the winner's, and that
    /// of one agent drawn uniformly among the others (0 when M = 1).
    std::size_t omega_winner = 0;
    std::size_t omega_random = 0;
    InfluenceNetwork halt_network;

    friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// Fittest neighbor if strictly fitter than k; ties go to the lowest id.
std::optional<AgentId> select_model(const Group& group, AgentId k, std::span<const AgentId> neighborhood);

/// A decided but not yet applied update of one agent.
struct PlannedUpdate {
    UpdateOutcome outcome;
    BitString new_string;
    double new_fitness = 0.0;
};

/// Decides the flip for target k given its neighborhood.
///
/// Draw order: when a model exists, one uniform() draw decides imitation
/// (imitate iff draw < p); then one below() draw picks the bit, uniformly
/// among all N positions for a random flip or among the positions where
/// target and model differ for an imitation flip.
PlannedUpdate plan_update(const Group& group, AgentId k, std::span<const AgentId> neighborhood,
                          const SearchContext& context, double imitation_prob, Rng& rng);

void apply_update(Group& group, const PlannedUpdate& update);

/// Computes k's neighborhood from current fitness, then plans and applies one update.
UpdateOutcome update_target(Group& group, AgentId k, const SearchContext& context, const SearchParams& params,
                            Rng& rng);

/// Runs one asynchronous imitative search until some agent holds the global maximum.
///
/// All randomness comes from Rng(params.seed): group initialisation first
/// (see init_group), then per update one below(M) draw for the target
/// followed by the plan_update draws. At halt, one below(M - 1) draw picks the
/// agent for omega_random.
SearchResult run_search(const SearchContext& context, const SearchParams& params);
SearchResult run_search(const NKLandscape& landscape, const SearchParams& params);

}  // namespace nkpolicy
