#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmlab/special_fn.hpp"

namespace kmlab {

struct MomentCell {
    double value = 0.0;
    double std_err = 0.0;
    bool degraded = false;

    bool operator==(const MomentCell&) const = default;
};

/// Diagnostics sampled on an increasing time grid. Each column is keyed by a
/// diagnostic name: "m4" for the polynomial moment of order 4,
/// "exp[alpha=..;s=..]" for stretched exponential moments,
/// "ml[alpha=..;s=..]" for Mittag-Leffler moments, "var0".."var2" for
/// per-component second moments.
class MomentTable {
public:
    MomentTable() = default;
    explicit MomentTable(std::vector<std::string> keys);

    const std::vector<std::string>& keys() const noexcept { return keys_; }
    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t rows() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    /// Appends a row; times must strictly increase and `cells` must match keys().
    void add_row(double t, std::vector<MomentCell> cells);

    std::optional<std::size_t> column(std::string_view key) const;
    const MomentCell& at(std::size_t row, std::size_t col) const;
    /// Throws DomainError for an unknown key.
    const MomentCell& at(std::size_t row, std::string_view key) const;

    /// Appends rows of `other` (same keys) whose time exceeds the last row.
    void extend(const MomentTable& other);

    bool operator==(const MomentTable&) const = default;

private:
    std::vector<std::string> keys_;
    std::vector<double> times_;
    std::vector<std::vector<MomentCell>> cells_;
};

std::string order_key(int order);
std::string exp_key(const MLSpec& spec);
std::string ml_key(const MLSpec& spec);

}  // namespace kmlab
