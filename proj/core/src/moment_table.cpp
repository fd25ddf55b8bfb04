#include "kmlab/moment_table.hpp"

#include <algorithm>
#include <cstdio>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

std::string spec_suffix(const MLSpec& spec)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "[alpha=%.17g;s=%.17g]", spec.alpha(), spec.s());
    return buf;
}

}  // namespace

MomentTable::MomentTable(std::vector<std::string> keys) : keys_(std::move(keys)) {}

void MomentTable::add_row(double t, std::vector<MomentCell> cells)
{
    if (cells.size() != keys_.size()) {
        throw DomainError("MomentTable::add_row: expected " + std::to_string(keys_.size()) +
                          " cells, got " + std::to_string(cells.size()));
    }
    if (!times_.empty() && !(t > times_.back())) {
        throw DomainError("MomentTable::add_row: times must strictly increase");
    }
    times_.push_back(t);
    cells_.push_back(std::move(cells));
}

std::optional<std::size_t> MomentTable::column(std::string_view key) const
{
    const auto it = std::find(keys_.begin(), keys_.end(), key);
    if (it == keys_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - keys_.begin());
}

const MomentCell& MomentTable::at(std::size_t row, std::size_t col) const
{
    return cells_.at(row).at(col);
}

const MomentCell& MomentTable::at(std::size_t row, std::string_view key) const
{
    const auto col = column(key);
    if (!col) throw DomainError("MomentTable: unknown diagnostic '" + std::string(key) + "'");
    return at(row, *col);
}

void MomentTable::extend(const MomentTable& other)
{
    if (other.keys_ != keys_) throw DomainError("MomentTable::extend: key mismatch");
    for (std::size_t r = 0; r < other.rows(); ++r) {
        if (!times_.empty() && other.times_[r] <= times_.back()) continue;
        add_row(other.times_[r], other.cells_[r]);
    }
}

std::string order_key(int order) { return "m" + std::to_string(order); }
std::string exp_key(const MLSpec& spec) { return "exp" + spec_suffix(spec); }
std::string ml_key(const MLSpec& spec) { return "ml" + spec_suffix(spec); }

}  // namespace kmlab
