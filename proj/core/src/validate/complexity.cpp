// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/validate/complexity.hpp"

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace minseek {

namespace {

double r_squared(std::span<const double> y, const std::vector<double>& fitted) {
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) {
        return ss_res == 0.0 ? 1.0 : 0.0;
    }
    return 1.0 - ss_res / ss_tot;
}

// Gaussian elimination with partial pivoting on a 3x3 system.
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (std::size_t col = 0; col < 3; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(m[pivot][col]) < 1e-300) {
            throw std::invalid_argument("degenerate data for quadratic fit");
        }
        std::swap(m[col], m[pivot]);
        for (std::size_t r = 0; r < 3; ++r) {
            if (r == col) {
                continue;
            }
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < 4; ++c) {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace

ComplexityFit fit_points(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("fit needs at least 3 paired points");
    }
    const std::size_t n = x.size();
    double x_max = 0.0;
    for (double v : x) {
        x_max = std::max(x_max, std::abs(v));
    }
    if (x_max == 0.0) {
        throw std::invalid_argument("fit needs non-zero x values");
    }

    // x scaled into [-1, 1].
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = x[i] / x_max;
    }

    ComplexityFit fit;
    fit.points = n;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, sx3 = 0, sx4 = 0, sx2y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s[i];
        sx += v;
        sy += y[i];
        sxx += v * v;
        sxy += v * y[i];
        sx3 += v * v * v;
        sx4 += v * v * v * v;
        sx2y += v * v * y[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) {
        throw std::invalid_argument("fit needs at least two distinct x values");
    }
    const double slope_s = (dn * sxy - sx * sy) / denom;
    fit.intercept = (sy - slope_s * sx) / dn;
    fit.slope = slope_s / x_max;

    std::vector<double> fitted(n);
    for (std::size_t i = 0; i < n; ++i) {
        fitted[i] = slope_s * s[i] + fit.intercept;
    }
    fit.linear_r2 = r_squared(y, fitted);

    const auto q = solve3({{{sx4, sx3, sxx, sx2y}, {sx3, sxx, sx, sxy}, {sxx, sx, dn, sy}}});
    fit.quad_a = q[0] / (x_max * x_max);
    fit.quad_b = q[1] / x_max;
    fit.quad_c = q[2];
    for (std::size_t i = 0; i < n; ++i) {
        fitted[i] = q[0] * s[i] * s[i] + q[1] * s[i] + q[2];
    }
    fit.quadratic_r2 = r_squared(y, fitted);
    return fit;
}

ComplexityFit fit_complexity(std::span<const CostRecord> records, std::size_t min_cycles) {
    std::set<std::size_t> cycles;
    for (const CostRecord& r : records) {
        cycles.insert(r.cycle);
    }
    if (cycles.size() < min_cycles) {
        throw std::invalid_argument("complexity fit needs at least " + std::to_string(min_cycles) +
                                    " cycles, got " + std::to_string(cycles.size()));
    }
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(records.size());
    y.reserve(records.size());
    for (const CostRecord& r : records) {
        x.push_back(static_cast<double>(r.cumulative_tokens));
        y.push_back(static_cast<double>(r.cumulative_scores));
    }
    return fit_points(x, y);
}

std::vector<double> mean_cost_per_cycle(std::span<const CostRecord> records) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const CostRecord& r : records) {
        auto& [sum, count] = acc[r.cycle];
        sum += static_cast<double>(r.attention_scores);
        ++count;
    }
    std::vector<double> out;
    out.reserve(acc.size());
    for (const auto& [cycle, entry] : acc) {
        out.push_back(entry.first / static_cast<double>(entry.second));
    }
    return out;
}

std::vector<std::uint64_t> cumulative_cost_by_cycle(std::span<const CostRecord> records) {
    std::map<std::size_t, std::uint64_t> last;
    for (const CostRecord& r : records) {
        last[r.cycle] = r.cumulative_scores;
    }
    std::vector<std::uint64_t> out;
    out.reserve(last.size());
    for (const auto& [cycle, total] : last) {
        out.push_back(total);
    }
    return out;
}

}  // namespace minseek
