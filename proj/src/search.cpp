#include "nkpolicy/search.hpp"

#include <bit>
#include <cmath>
#include <fmt/format.h>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

namespace {

// Position of the r-th (0-based) set bit of x.
int nth_set_bit(std::uint32_t x, std::uint64_t r) {
    for (; r > 0; --r) x &= x - 1;
    return std::countr_zero(x);
}

std::uint64_t effective_cap(const SearchParams& params, int n) {
    return params.max_updates != 0 ? params.max_updates : std::uint64_t{10000} << n;
}

struct Snapshot {
    std::size_t omega_winner = 0;
    std::size_t omega_random = 0;
    InfluenceNetwork network;
};

Snapshot take_snapshot(const Group& group, AgentId winner, std::size_t omega_winner, double alpha, Rng& rng) {
    Snapshot s;
    s.omega_winner = omega_winner;
    s.network = build_influence_network(group, alpha);
    if (group.size() > 1) {
        auto pick = static_cast<AgentId>(rng.below(group.size() - 1));
        if (pick >= winner) ++pick;
        s.omega_random = s.network.adjacency[pick].size();
    }
    return s;
}

}  // namespace

void validate(const SearchParams& params) {
    if (params.group_size < 1) throw ParameterError(fmt::format("group size M must be >= 1, got {}", params.group_size));
    if (!(params.imitation_prob >= 0.0 && params.imitation_prob <= 1.0)) {
        throw ParameterError(fmt::format("imitation probability must be in [0, 1], got {}", params.imitation_prob));
    }
    if (!(params.density > 0.0)) throw ParameterError(fmt::format("density must be positive, got {}", params.density));
    if (!std::isfinite(params.alpha)) throw ParameterError("alpha must be finite");
}

SearchContext::SearchContext(const NKLandscape& landscape)
    : landscape_(&landscape), fitness_(exhaustive_fitness(landscape)), global_(global_maximum(landscape)) {}

std::optional<AgentId> select_model(const Group& group, AgentId k, std::span<const AgentId> neighborhood) {
    std::optional<AgentId> best;
    double best_fitness = group.agent(k).fitness;
    for (AgentId j : neighborhood) {
        const double f = group.agent(j).fitness;
        if (f > best_fitness || (best && f == best_fitness && j < *best)) {
            best = j;
            best_fitness = f;
        }
    }
    return best;
}

PlannedUpdate plan_update(const Group& group, AgentId k, std::span<const AgentId> neighborhood,
                          const SearchContext& context, double imitation_prob, Rng& rng) {
    const Agent& target = group.agent(k);
    const int n = target.string.length();
    PlannedUpdate plan;
    plan.outcome.target = k;

    const std::optional<AgentId> model = select_model(group, k, neighborhood);
    if (model && rng.uniform() < imitation_prob) {
        const std::uint32_t discordant = target.string.bits() ^ group.agent(*model).string.bits();
        const auto choice = rng.below(static_cast<std::uint64_t>(std::popcount(discordant)));
        plan.outcome.action = UpdateAction::imitation_flip;
        plan.outcome.model = model;
        plan.outcome.flipped_bit = nth_set_bit(discordant, choice);
    } else {
        plan.outcome.action = UpdateAction::random_flip;
        plan.outcome.flipped_bit = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    }
    plan.new_string = target.string.flipped(plan.outcome.flipped_bit);
    plan.new_fitness = context.fitness_of(plan.new_string.bits());
    plan.outcome.found_global = plan.new_string == context.global().string;
    return plan;
}

void apply_update(Group& group, const PlannedUpdate& update) {
    group.set_string(update.outcome.target, update.new_string, update.new_fitness);
}

UpdateOutcome update_target(Group& group, AgentId k, const SearchContext& context, const SearchParams& params,
                            Rng& rng) {
    const std::vector<AgentId> neighborhood = group.neighborhood(k, params.alpha);
    const PlannedUpdate plan = plan_update(group, k, neighborhood, context, params.imitation_prob, rng);
    apply_update(group, plan);
    return plan.outcome;
}

SearchResult run_search(const SearchContext& context, const SearchParams& params) {
    validate(params);
    const NKLandscape& landscape = context.landscape();
    Rng rng(params.seed);
    Group group = init_group(params.group_size, params.density, landscape, rng);
    const auto m = static_cast<std::uint64_t>(group.size());

    std::vector<double> initial_fitness;
    initial_fitness.reserve(group.size());
    for (const Agent& a : group.agents()) initial_fitness.push_back(a.fitness);

    SearchResult result;
    result.initial_mean_fitness = group.mean_fitness();

    auto finish = [&](AgentId winner, std::size_t omega_winner) {
        Snapshot snap = take_snapshot(group, winner, omega_winner, params.alpha, rng);
        result.winner = winner;
        result.winner_initial_fitness = initial_fitness[winner];
        result.omega_winner = snap.omega_winner;
        result.omega_random = snap.omega_random;
        result.halt_network = std::move(snap.network);
    };

    for (const Agent& a : group.agents()) {
        if (a.string == context.global().string) {
            finish(a.id, group.neighborhood(a.id, params.alpha).size());
            return result;
        }
    }

    const std::uint64_t cap = effective_cap(params, landscape.n());
    std::vector<AgentId> neighborhood;
    neighborhood.reserve(group.size());
    while (result.updates < cap) {
        const auto k = static_cast<AgentId>(rng.below(m));
        group.neighborhood(k, params.alpha, neighborhood);
        const PlannedUpdate plan = plan_update(group, k, neighborhood, context, params.imitation_prob, rng);
        ++result.updates;
        if (plan.outcome.found_global) {
            finish(k, neighborhood.size());
            apply_update(group, plan);
            break;
        }
        apply_update(group, plan);
    }

    result.timed_out = !result.winner.has_value();
    result.t_star = static_cast<double>(result.updates) / static_cast<double>(m);
    result.cost = static_cast<double>(result.updates) / static_cast<double>(std::uint64_t{1} << landscape.n());
    return result;
}

SearchResult run_search(const NKLandscape& landscape, const SearchParams& params) {
    const SearchContext context(landscape);
    return run_search(context, params);
}

}  // namespace nkpolicy
