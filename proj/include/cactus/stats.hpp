#pragma once

#include <span>
#include <string>
#include <vector>

#include "cactus/errors.hpp"

namespace cactus::stats {

class StatsError : public Error {
public:
    enum class Kind { LengthMismatch, ZeroVariance, AllTied, ZeroTrials, EmptyInput };

    StatsError(Kind kind, const std::string& message);

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Fractional ranks, 1-based; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Sample Pearson correlation. Throws LengthMismatch (sizes differ or n < 2)
// or ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

// Spearman's rho: Pearson over average-tied ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// Kendall's tau-b (tie-corrected), computed with sort-based counting.
// Throws AllTied when either vector is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Two-sided exact binomial sign test on (a_wins, b_wins) under p = 1/2,
// clamped to 1.0. Throws ZeroTrials when a_wins + b_wins == 0.
double sign_test_p(long a_wins, long b_wins);

} // namespace cactus::stats
