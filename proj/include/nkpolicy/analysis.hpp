#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nkpolicy/arena.hpp"
#include "nkpolicy/search.hpp"

namespace nkpolicy {

/// Blind single-bit-flip walk on Hamming-distance classes d = 0..N to a fixed
/// target string. Class 0 is absorbing; from d >= 1 the walk moves to d - 1
/// with probability d/N and to d + 1 with probability (N - d)/N.
struct HammingChain {
    int n = 0;
    /// Row-major (N+1) x (N+1) row-stochastic matrix.
    std::vector<double> transition;

    double operator()(int from, int to) const {
        return transition[static_cast<std::size_t>(from) * static_cast<std::size_t>(n + 1) +
                          static_cast<std::size_t>(to)];
    }
};

HammingChain build_chain(int n);

struct EigenPair {
    double value = 0.0;
    /// Eigenvector over the transient classes 1..N (index 0 is class 1), unit norm.
    std::vector<double> vector;
};

/// Largest eigenvalue of the transient block (classes 1..N), i.e. the second
/// largest eigenvalue of the chain after the absorbing eigenvalue 1.
///
/// The transient block is tridiagonal with positive off-diagonals, so it is
/// similar to a symmetric tridiagonal matrix; that matrix is diagonalised
/// with a self-adjoint eigensolver and the eigenvector is mapped back.
EigenPair second_eigenpair(const HammingChain& chain);
double second_eigenvalue(const HammingChain& chain);

/// Mean rescaled cost of M independent searchers:
/// M / (2^N (1 - lambda_N^M)).
double independent_cost(int n, int m);

/// Mean absorption time of the chain from a Binomial(N, 1/2) start, by a
/// direct linear solve. Counts start in class 0 as time 0.
double mean_absorption_time(const HammingChain& chain);

struct SccReport {
    std::size_t num_components = 0;
    std::size_t largest_size = 0;
    double n_c = 0.0;
    double g_c = 0.0;
    /// size_histogram[s] = number of components with s nodes (index 0 unused).
    std::vector<std::size_t> size_histogram;

    friend bool operator==(const SccReport&, const SccReport&) = default;
};

/// Component label of every node (labels are 0-based, in Tarjan completion order).
std::vector<std::uint32_t> scc_labels(const InfluenceNetwork& net);
SccReport scc_decomposition(const InfluenceNetwork& net);

/// Per-run quantities retained after a search; the rows of the raw table.
struct RunSummary {
    double cost = 0.0;
    double phi_w0 = 0.0;
    double phi_bar0 = 0.0;
    std::size_t omega_winner = 0;
    std::size_t omega_random = 0;
    double n_c = 0.0;
    double g_c = 0.0;
    bool timed_out = false;
};

RunSummary summarize(const SearchResult& result);

struct RunAggregate {
    std::size_t runs_used = 0;
    std::size_t timeouts = 0;
    double mean_cost = 0.0;
    double stderr_cost = 0.0;
    double mean_edge = 0.0;
    double stderr_edge = 0.0;
    double mean_nc = 0.0;
    double mean_gc = 0.0;
    /// Normalised histograms over Omega = 0..M-1.
    std::vector<double> omega_winner_hist;
    std::vector<double> omega_random_hist;
};

/// Means and standard errors (sample sd / sqrt(runs)) over non-timed-out runs.
/// Throws ParameterError on empty input or when group_size < 1.
RunAggregate aggregate_runs(std::span<const RunSummary> runs, int group_size);
RunAggregate aggregate_runs(std::span<const SearchResult> results, int group_size);

struct MeanSem {
    double mean = 0.0;
    /// Standard error of the mean; 0 for a single sample.
    double sem = 0.0;
};

MeanSem mean_and_sem(std::span<const double> samples);

}  // namespace nkpolicy
