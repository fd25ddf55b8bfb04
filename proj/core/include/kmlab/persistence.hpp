#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kmlab/ensemble.hpp"
#include "kmlab/moment_table.hpp"

namespace kmlab {

std::string_view library_version();

/// Long-format CSV: `t,order_or_spec,value,std_err,flags`, one row per
/// (time, diagnostic), reals with 17 significant digits. Leading '#' lines
/// document the columns and list the diagnostic keys, so an empty table
/// round-trips too.
std::string moment_csv_text(const MomentTable& table);
MomentTable parse_moment_csv(std::string_view text);
void write_moment_csv(const MomentTable& table, const std::string& path);
MomentTable read_moment_csv(const std::string& path);

/// Binary snapshot: "KMEN", u16 version, u16 d, u64 N, f64 time,
/// u64 state length, state bytes, N*d f64 velocities; all little-endian.
inline constexpr std::uint16_t kSnapshotVersion = 1;
std::vector<std::uint8_t> snapshot_bytes(const ParticleEnsemble& ens);
ParticleEnsemble restore_bytes(const std::vector<std::uint8_t>& bytes);
void snapshot(const ParticleEnsemble& ens, const std::string& path);
ParticleEnsemble restore(const std::string& path);

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version{library_version()};
    std::string start_time;  ///< UTC, ISO 8601
    std::string end_time;
    std::vector<std::string> outputs;
};

std::string utc_timestamp();
std::string manifest_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace kmlab
