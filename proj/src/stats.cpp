#include "cactus/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace cactus::stats {

namespace {

std::string kind_code(StatsError::Kind k) {
    switch (k) {
        case StatsError::Kind::LengthMismatch: return "length_mismatch";
        case StatsError::Kind::ZeroVariance: return "zero_variance";
        case StatsError::Kind::AllTied: return "all_tied";
        case StatsError::Kind::ZeroTrials: return "zero_trials";
        case StatsError::Kind::EmptyInput: return "empty_input";
    }
    return "stats_error";
}

void require_paired(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw StatsError(StatsError::Kind::LengthMismatch,
                         "vectors of length " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    if (x.size() < 2)
        throw StatsError(StatsError::Kind::LengthMismatch,
                         "need at least 2 paired observations");
}

// Pairs (i < j) with seq[i] > seq[j], counted by merge sort.
uint64_t count_inversions(std::vector<double>& seq) {
    const size_t n = seq.size();
    std::vector<double> buf(n);
    uint64_t inversions = 0;
    for (size_t width = 1; width < n; width *= 2) {
        for (size_t lo = 0; lo + width < n; lo += 2 * width) {
            size_t mid = lo + width;
            size_t hi = std::min(lo + 2 * width, n);
            size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (seq[i] <= seq[j]) {
                    buf[k++] = seq[i++];
                } else {
                    inversions += mid - i;
                    buf[k++] = seq[j++];
                }
            }
            while (i < mid) buf[k++] = seq[i++];
            while (j < hi) buf[k++] = seq[j++];
            std::copy(buf.begin() + lo, buf.begin() + hi, seq.begin() + lo);
        }
    }
    return inversions;
}

uint64_t tie_pair_count(std::vector<double> sorted_values) {
    std::sort(sorted_values.begin(), sorted_values.end());
    uint64_t pairs = 0;
    size_t i = 0;
    while (i < sorted_values.size()) {
        size_t j = i;
        while (j < sorted_values.size() && sorted_values[j] == sorted_values[i]) ++j;
        uint64_t run = j - i;
        pairs += run * (run - 1) / 2;
        i = j;
    }
    return pairs;
}

} // namespace

StatsError::StatsError(Kind kind, const std::string& message)
    : Error(kind_code(kind), message), kind_(kind) {}

std::vector<double> average_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 (0-based) share rank mean((i+1) + ... + j) = (i+j+1)/2.
        double rank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
        for (size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw StatsError(StatsError::Kind::ZeroVariance,
                         sxx == 0.0 ? "x has zero variance" : "y has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    const size_t n = x.size();

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Joint ties: runs equal in both coordinates after the (x, y) sort.
    uint64_t joint_ties = 0;
    {
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j < n && x[order[j]] == x[order[i]] && y[order[j]] == y[order[i]]) ++j;
            uint64_t run = j - i;
            joint_ties += run * (run - 1) / 2;
            i = j;
        }
    }

    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    const uint64_t x_ties = tie_pair_count(xs);
    const uint64_t y_ties = tie_pair_count(ys);
    const uint64_t total = static_cast<uint64_t>(n) * (n - 1) / 2;

    if (total == x_ties || total == y_ties)
        throw StatsError(StatsError::Kind::AllTied,
                         "tau-b denominator is zero (a vector is constant)");

    // Within an x-tie run ys is ascending, so x-tied pairs add no inversions;
    // every counted inversion is a strictly discordant pair.
    const uint64_t discordant = count_inversions(ys);

    const double con_minus_dis =
        static_cast<double>(total) - static_cast<double>(x_ties) -
        static_cast<double>(y_ties) + static_cast<double>(joint_ties) -
        2.0 * static_cast<double>(discordant);
    return con_minus_dis / (std::sqrt(static_cast<double>(total - x_ties)) *
                            std::sqrt(static_cast<double>(total - y_ties)));
}

double sign_test_p(long a_wins, long b_wins) {
    if (a_wins < 0 || b_wins < 0)
        throw StatsError(StatsError::Kind::ZeroTrials, "negative win counts");
    const long n = a_wins + b_wins;
    if (n == 0)
        throw StatsError(StatsError::Kind::ZeroTrials, "no untied trials");
    const long k = std::max(a_wins, b_wins);

    // 2 * P(X >= k) for X ~ Binomial(n, 1/2), accumulated from the smallest
    // tail term upward.
    double term = std::exp(-static_cast<double>(n) * std::log(2.0));  // C(n,n)/2^n
    double tail = term;
    for (long i = n - 1; i >= k; --i) {
        term *= static_cast<double>(i + 1) / static_cast<double>(n - i);
        tail += term;
    }
    return std::min(1.0, 2.0 * tail);
}

} // namespace cactus::stats
