#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nkpolicy/analysis.hpp"
#include "nkpolicy/errors.hpp"
#include "nkpolicy/rng.hpp"

using namespace nkpolicy;

namespace {

// Mutual reachability by repeated DFS; O(V (V + E)).
std::vector<std::vector<bool>> reachability(const InfluenceNetwork& net) {
    const std::size_t n = net.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack = {s};
        reach[s][s] = true;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (AgentId w : net.adjacency[v]) {
                if (!reach[s][w]) {
                    reach[s][w] = true;
                    stack.push_back(w);
                }
            }
        }
    }
    return reach;
}

SccReport oracle_report(const InfluenceNetwork& net) {
    const std::size_t n = net.size();
    const auto reach = reachability(net);
    std::vector<bool> assigned(n, false);
    SccReport report;
    std::vector<std::size_t> sizes;
    for (std::size_t v = 0; v < n; ++v) {
        if (assigned[v]) continue;
        std::size_t size = 0;
        for (std::size_t w = v; w < n; ++w) {
            if (reach[v][w] && reach[w][v]) {
                assigned[w] = true;
                ++size;
            }
        }
        ++report.num_components;
        sizes.push_back(size);
        report.largest_size = std::max(report.largest_size, size);
    }
    report.size_histogram.assign(report.largest_size + 1, 0);
    for (std::size_t s : sizes) ++report.size_histogram[s];
    report.n_c = static_cast<double>(report.num_components) / static_cast<double>(n);
    report.g_c = static_cast<double>(report.largest_size) / static_cast<double>(n);
    return report;
}

InfluenceNetwork random_digraph(std::size_t n, double p, Rng& rng) {
    InfluenceNetwork net;
    net.adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.uniform() < p) net.adjacency[i].push_back(static_cast<AgentId>(j));
    return net;
}

InfluenceNetwork reversed(const InfluenceNetwork& net) {
    InfluenceNetwork out;
    out.adjacency.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i)
        for (AgentId j : net.adjacency[i]) out.adjacency[j].push_back(static_cast<AgentId>(i));
    for (auto& a : out.adjacency) std::sort(a.begin(), a.end());
    return out;
}

InfluenceNetwork relabeled(const InfluenceNetwork& net, const std::vector<AgentId>& perm) {
    InfluenceNetwork out;
    out.adjacency.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i)
        for (AgentId j : net.adjacency[i]) out.adjacency[perm[i]].push_back(perm[j]);
    for (auto& a : out.adjacency) std::sort(a.begin(), a.end());
    return out;
}

RunSummary summary(double cost, std::size_t ow, std::size_t orand, bool timed_out = false) {
    RunSummary r;
    r.cost = cost;
    r.phi_w0 = 0.6;
    r.phi_bar0 = 0.5;
    r.omega_winner = ow;
    r.omega_random = orand;
    r.n_c = 0.5;
    r.g_c = 0.25;
    r.timed_out = timed_out;
    return r;
}

}  // namespace

TEST_CASE("chain rows") {
    const HammingChain c = build_chain(2);
    const double expected[3][3] = {{1, 0, 0}, {0.5, 0, 0.5}, {0, 1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(c(i, j) == expected[i][j]);

    for (int n : {1, 5, 12, 20}) {
        const HammingChain chain = build_chain(n);
        REQUIRE(chain.transition.size() == static_cast<std::size_t>((n + 1) * (n + 1)));
        for (int i = 0; i <= n; ++i) {
            double sum = 0;
            for (int j = 0; j <= n; ++j) sum += chain(i, j);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS(build_chain(0), ParameterError);
}

TEST_CASE("second eigenvalue") {
    CHECK(std::abs(second_eigenvalue(build_chain(12)) - 0.99978) < 5e-6);
    CHECK(second_eigenvalue(build_chain(2)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // N = 1 absorbs in one step, so its transient block is [0].
    CHECK(second_eigenvalue(build_chain(1)) == 0.0);
    for (int n = 2; n <= 24; ++n) {
        const double l = second_eigenvalue(build_chain(n));
        CHECK(l > 0.0);
        CHECK(l < 1.0);
    }
}

TEST_CASE("eigenvector satisfies the transient block equation") {
    for (int n : {2, 7, 12, 18}) {
        const HammingChain c = build_chain(n);
        const EigenPair e = second_eigenpair(c);
        REQUIRE(e.vector.size() == static_cast<std::size_t>(n));
        double norm = 0;
        for (double v : e.vector) norm += v * v;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        double residual = 0;
        for (int i = 1; i <= n; ++i) {
            double row = 0;
            for (int j = 1; j <= n; ++j) row += c(i, j) * e.vector[static_cast<std::size_t>(j - 1)];
            residual = std::max(residual, std::abs(row - e.value * e.vector[static_cast<std::size_t>(i - 1)]));
        }
        CHECK(residual < 1e-10);
    }
}

TEST_CASE("absorption time oracle") {
    // N = 2: tau1 = 1 + tau2 / 2, tau2 = 1 + tau1, so tau1 = 3, tau2 = 4; Binomial(2, 1/2) start.
    CHECK(mean_absorption_time(build_chain(2)) == doctest::Approx(2.5));
    // Long-time decay dominated by the slowest mode.
    const double lambda = second_eigenvalue(build_chain(12));
    CHECK(mean_absorption_time(build_chain(12)) == doctest::Approx(1.0 / (1.0 - lambda)).epsilon(0.03));
}

TEST_CASE("independent searchers") {
    CHECK(independent_cost(12, 1) == doctest::Approx(1.11).epsilon(0.01));
    // Flat for small M.
    for (int m = 2; m <= 10; ++m) CHECK(independent_cost(12, m) == doctest::Approx(1.11).epsilon(0.01));
    // Linear for M >> <t*_1>.
    CHECK(independent_cost(12, 100000) == doctest::Approx(100000.0 / 4096.0).epsilon(1e-6));
    double prev = 0;
    for (int m = 1; m <= 4096; m *= 2) {
        const double c = independent_cost(12, m);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK_THROWS_AS(independent_cost(12, 0), ParameterError);
}

TEST_CASE("scc examples") {
    InfluenceNetwork cycle{{{1}, {2}, {0}}};
    SccReport r = scc_decomposition(cycle);
    CHECK(r.num_components == 1);
    CHECK(r.largest_size == 3);
    CHECK(r.n_c == doctest::Approx(1.0 / 3.0));
    CHECK(r.g_c == 1.0);

    InfluenceNetwork chain{{{1}, {2}, {}}};
    r = scc_decomposition(chain);
    CHECK(r.num_components == 3);
    CHECK(r.largest_size == 1);
    CHECK(r.size_histogram[1] == 3);
    CHECK(r.n_c == 1.0);

    CHECK(scc_decomposition(reversed(cycle)) == scc_decomposition(cycle));
    CHECK(scc_decomposition(reversed(chain)) == scc_decomposition(chain));

    // Every node of an M-agent group with no edges is its own component.
    InfluenceNetwork isolated;
    isolated.adjacency.resize(10);
    r = scc_decomposition(isolated);
    CHECK(r.n_c == 1.0);
    CHECK(r.g_c == doctest::Approx(0.1));
}

TEST_CASE("scc matches a reachability oracle on random digraphs") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        const double p = 0.2 * rng.uniform() * 10.0 / static_cast<double>(n);
        const InfluenceNetwork net = random_digraph(n, p, rng);
        const SccReport r = scc_decomposition(net);
        REQUIRE(r == oracle_report(net));
        REQUIRE(scc_decomposition(reversed(net)) == r);

        std::vector<AgentId> perm(n);
        std::iota(perm.begin(), perm.end(), AgentId{0});
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        REQUIRE(scc_decomposition(relabeled(net, perm)) == r);

        const auto labels = scc_labels(net);
        const auto reach = reachability(net);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                REQUIRE((labels[a] == labels[b]) == (reach[a][b] && reach[b][a]));
    }
}

TEST_CASE("scc on a long path does not overflow the stack") {
    InfluenceNetwork path;
    const std::size_t n = 200000;
    path.adjacency.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) path.adjacency[i].push_back(static_cast<AgentId>(i + 1));
    path.adjacency[n - 1].push_back(0);
    const SccReport r = scc_decomposition(path);
    CHECK(r.num_components == 1);
    CHECK(r.g_c == 1.0);
}

TEST_CASE("aggregate_runs") {
    std::vector<RunSummary> same(5, summary(0.25, 0, 3));
    RunAggregate a = aggregate_runs(same, 4);
    CHECK(a.runs_used == 5);
    CHECK(a.mean_cost == 0.25);
    CHECK(a.stderr_cost == 0.0);
    CHECK(a.mean_edge == doctest::Approx(0.1));
    CHECK(a.mean_nc == 0.5);
    CHECK(a.mean_gc == 0.25);
    REQUIRE(a.omega_winner_hist.size() == 4);
    CHECK(a.omega_winner_hist[0] == 1.0);
    CHECK(a.omega_random_hist[3] == 1.0);
    CHECK(std::accumulate(a.omega_winner_hist.begin(), a.omega_winner_hist.end(), 0.0) == 1.0);

    std::vector<RunSummary> mixed = {summary(1.0, 0, 0), summary(3.0, 1, 0), summary(100.0, 2, 2, true)};
    a = aggregate_runs(mixed, 3);
    CHECK(a.runs_used == 2);
    CHECK(a.timeouts == 1);
    CHECK(a.mean_cost == 2.0);
    // Sample sd sqrt(2), over sqrt(2).
    CHECK(a.stderr_cost == doctest::Approx(1.0));
    CHECK(a.omega_winner_hist[0] == 0.5);
    CHECK(a.omega_winner_hist[1] == 0.5);
    CHECK(a.omega_winner_hist[2] == 0.0);

    CHECK_THROWS_AS(aggregate_runs(std::vector<RunSummary>{}, 3), ParameterError);
    CHECK_THROWS_AS(aggregate_runs(same, 0), ParameterError);
}

TEST_CASE("mean_and_sem") {
    const std::vector<double> xs = {1, 2, 3, 4};
    const MeanSem m = mean_and_sem(xs);
    CHECK(m.mean == 2.5);
    CHECK(m.sem == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_and_sem(std::vector<double>{7}).sem == 0.0);
}
