#include "nkpolicy/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

HammingChain build_chain(int n) {
    if (n < 1) throw ParameterError(fmt::format("chain length N must be >= 1, got {}", n));
    HammingChain chain{n, std::vector<double>(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0)};
    const auto at = [&](int r, int c) -> double& {
        return chain.transition[static_cast<std::size_t>(r) * static_cast<std::size_t>(n + 1) +
                                static_cast<std::size_t>(c)];
    };
    at(0, 0) = 1.0;
    for (int d = 1; d <= n; ++d) {
        at(d, d - 1) = static_cast<double>(d) / n;
        if (d < n) at(d, d + 1) = static_cast<double>(n - d) / n;
    }
    return chain;
}

EigenPair second_eigenpair(const HammingChain& chain) {
    const int n = chain.n;
    // Transient block B over classes 1..n; B = D S D^{-1} with S symmetric.
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        const double up = chain(i + 1, i + 2);
        const double down = chain(i + 2, i + 1);
        sym(i, i + 1) = sym(i + 1, i) = std::sqrt(up * down);
    }
    for (int i = 0; i < n; ++i) sym(i, i) = chain(i + 1, i + 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError(fmt::format("eigensolver failed on {}x{} transient block (info={})", n, n,
                                         static_cast<int>(solver.info())));
    }
    const Eigen::Index top = n - 1;  // eigenvalues are sorted ascending
    const Eigen::VectorXd u = solver.eigenvectors().col(top);

    // v = D u with D_1 = 1 and D_{i+1} = D_i * S(i, i+1) / B(i, i+1).
    Eigen::VectorXd v(n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        v(i) = scale * u(i);
        if (i + 1 < n) scale *= sym(i, i + 1) / chain(i + 1, i + 2);
    }
    v.normalize();
    if (v.sum() < 0) v = -v;

    EigenPair out;
    out.value = solver.eigenvalues()(top);
    out.vector.assign(v.data(), v.data() + n);
    return out;
}

double second_eigenvalue(const HammingChain& chain) {
    return second_eigenpair(chain).value;
}

double independent_cost(int n, int m) {
    if (m < 1) throw ParameterError(fmt::format("group size M must be >= 1, got {}", m));
    const double lambda = second_eigenvalue(build_chain(n));
    return static_cast<double>(m) / (std::ldexp(1.0, n) * (1.0 - std::pow(lambda, m)));
}

double mean_absorption_time(const HammingChain& chain) {
    const int n = chain.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) -= chain(i + 1, j + 1);
    }
    const Eigen::VectorXd tau = a.fullPivLu().solve(Eigen::VectorXd::Ones(n));
    double mean = 0.0;
    double binom = 1.0;  // C(n, d)
    for (int d = 1; d <= n; ++d) {
        binom = binom * (n - d + 1) / d;
        mean += binom * tau(d - 1);
    }
    return std::ldexp(mean, -n);
}

std::vector<std::uint32_t> scc_labels(const InfluenceNetwork& net) {
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    const std::size_t size = net.size();
    std::vector<std::uint32_t> index(size, kUnvisited);
    std::vector<std::uint32_t> low(size, 0);
    std::vector<std::uint32_t> label(size, kUnvisited);
    std::vector<char> on_stack(size, 0);
    std::vector<AgentId> stack;
    // Explicit DFS frames: (node, next edge position).
    std::vector<std::pair<AgentId, std::size_t>> frames;
    std::uint32_t counter = 0;
    std::uint32_t components = 0;

    for (AgentId root = 0; root < size; ++root) {
        if (index[root] != kUnvisited) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;

        while (!frames.empty()) {
            auto& [v, edge] = frames.back();
            const auto& succ = net.adjacency[v];
            if (edge < succ.size()) {
                const AgentId w = succ[edge++];
                if (w >= size) throw ParameterError(fmt::format("edge {} -> {} points outside the graph", v, w));
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const AgentId done = v;
            frames.pop_back();
            if (!frames.empty()) {
                const AgentId parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                AgentId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    label[w] = components;
                } while (w != done);
                ++components;
            }
        }
    }
    return label;
}

SccReport scc_decomposition(const InfluenceNetwork& net) {
    SccReport report;
    const std::size_t size = net.size();
    if (size == 0) return report;
    const std::vector<std::uint32_t> labels = scc_labels(net);
    const std::uint32_t count = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(count, 0);
    for (std::uint32_t l : labels) ++sizes[l];

    report.num_components = count;
    report.largest_size = *std::max_element(sizes.begin(), sizes.end());
    report.n_c = static_cast<double>(count) / static_cast<double>(size);
    report.g_c = static_cast<double>(report.largest_size) / static_cast<double>(size);
    report.size_histogram.assign(report.largest_size + 1, 0);
    for (std::size_t s : sizes) ++report.size_histogram[s];
    return report;
}

RunSummary summarize(const SearchResult& result) {
    RunSummary s;
    s.cost = result.cost;
    s.phi_w0 = result.winner_initial_fitness;
    s.phi_bar0 = result.initial_mean_fitness;
    s.omega_winner = result.omega_winner;
    s.omega_random = result.omega_random;
    s.timed_out = result.timed_out;
    if (!result.timed_out) {
        const SccReport scc = scc_decomposition(result.halt_network);
        s.n_c = scc.n_c;
        s.g_c = scc.g_c;
    }
    return s;
}

MeanSem mean_and_sem(std::span<const double> samples) {
    if (samples.empty()) throw ParameterError("mean of an empty sample");
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / n;
    if (samples.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

RunAggregate aggregate_runs(std::span<const RunSummary> runs, int group_size) {
    if (runs.empty()) throw ParameterError("cannot aggregate an empty list of runs");
    if (group_size < 1) throw ParameterError(fmt::format("group size must be >= 1, got {}", group_size));

    RunAggregate agg;
    const auto bins = static_cast<std::size_t>(group_size);
    agg.omega_winner_hist.assign(bins, 0.0);
    agg.omega_random_hist.assign(bins, 0.0);

    std::vector<double> costs;
    std::vector<double> edges;
    double sum_nc = 0.0;
    double sum_gc = 0.0;
    for (const RunSummary& r : runs) {
        if (r.timed_out) {
            ++agg.timeouts;
            continue;
        }
        if (r.omega_winner >= bins || r.omega_random >= bins) {
            throw ParameterError(fmt::format("neighborhood size exceeds M - 1 = {}", group_size - 1));
        }
        costs.push_back(r.cost);
        edges.push_back(r.phi_w0 - r.phi_bar0);
        sum_nc += r.n_c;
        sum_gc += r.g_c;
        agg.omega_winner_hist[r.omega_winner] += 1.0;
        agg.omega_random_hist[r.omega_random] += 1.0;
    }
    agg.runs_used = costs.size();
    if (agg.runs_used == 0) return agg;

    const MeanSem cost = mean_and_sem(costs);
    const MeanSem edge = mean_and_sem(edges);
    const double used = static_cast<double>(agg.runs_used);
    agg.mean_cost = cost.mean;
    agg.stderr_cost = cost.sem;
    agg.mean_edge = edge.mean;
    agg.stderr_edge = edge.sem;
    agg.mean_nc = sum_nc / used;
    agg.mean_gc = sum_gc / used;
    for (double& p : agg.omega_winner_hist) p /= used;
    for (double& p : agg.omega_random_hist) p /= used;
    return agg;
}

RunAggregate aggregate_runs(std::span<const SearchResult> results, int group_size) {
    std::vector<RunSummary> runs;
    runs.reserve(results.size());
    for (const SearchResult& r : results) runs.push_back(summarize(r));
    return aggregate_runs(runs, group_size);
}

}  // namespace nkpolicy
