#include "kmlab/persistence.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

constexpr const char* kCsvHeader = "t,order_or_spec,value,std_err,flags";

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw IoError("moment csv row " + std::to_string(line) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const void* data, std::size_t size)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write to '" + path + "' failed");
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value)
{
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    template <class T>
    T get()
    {
        need(sizeof(T));
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        if constexpr (std::is_same_v<T, double>) {
            return std::bit_cast<double>(bits);
        } else {
            return static_cast<T>(bits);
        }
    }
    void need(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n) throw IoError("snapshot truncated at byte " + std::to_string(pos_));
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    const std::uint8_t* here() const { return bytes_.data() + pos_; }
    void skip(std::size_t n)
    {
        need(n);
        pos_ += n;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string_view library_version() { return KMLAB_VERSION_STRING; }

std::string moment_csv_text(const MomentTable& table)
{
    std::string out;
    out += "# kmlab moment table\n";
    out += "# t: simulated time (model time units)\n";
    out += "# order_or_spec: mN = polynomial moment of order N with <v> = sqrt(1+|v|^2); "
           "exp[alpha=..;s=..] = stretched exponential moment; ml[alpha=..;s=..] = Mittag-Leffler moment; "
           "varK = second moment of velocity component K\n";
    out += "# value: ensemble average (dimensionless); std_err: batch-means standard error; "
           "flags: ok or degraded (log-domain accumulation)\n";
    out += "# keys:";
    for (const auto& k : table.keys()) out += " " + k;
    out += "\n";
    out += kCsvHeader;
    out += "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const std::string t = fmt17(table.times()[r]);
        for (std::size_t c = 0; c < table.keys().size(); ++c) {
            const MomentCell& cell = table.at(r, c);
            out += t + "," + table.keys()[c] + "," + fmt17(cell.value) + "," + fmt17(cell.std_err) + "," +
                   (cell.degraded ? "degraded" : "ok") + "\n";
        }
    }
    return out;
}

MomentTable parse_moment_csv(std::string_view text)
{
    std::vector<std::string> keys;
    bool have_keys = false;
    bool have_header = false;
    MomentTable table;
    std::vector<MomentCell> pending;
    double pending_t = 0.0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view tag = "# keys:";
            if (line.substr(0, tag.size()) == tag) {
                std::istringstream is{std::string(line.substr(tag.size()))};
                std::string k;
                while (is >> k) keys.push_back(k);
                have_keys = true;
                table = MomentTable(keys);
            }
            continue;
        }
        if (!have_header) {
            if (line != kCsvHeader) throw IoError("moment csv row " + std::to_string(line_no) + ": bad header");
            if (!have_keys) throw IoError("moment csv: missing '# keys:' line before the header");
            have_header = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t b = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(b, i - b));
                b = i + 1;
            }
        }
        if (f.size() != 5) throw IoError("moment csv row " + std::to_string(line_no) + ": expected 5 fields");
        const double t = parse_real(f[0], line_no);
        if (pending.size() == keys.size()) pending.clear();
        if (pending.empty()) pending_t = t;
        if (t != pending_t) throw IoError("moment csv row " + std::to_string(line_no) + ": incomplete time block");
        if (f[1] != keys[pending.size()]) {
            throw IoError("moment csv row " + std::to_string(line_no) + ": expected key '" + keys[pending.size()] +
                          "'");
        }
        MomentCell cell{parse_real(f[2], line_no), parse_real(f[3], line_no), false};
        if (f[4] == "degraded") {
            cell.degraded = true;
        } else if (f[4] != "ok") {
            throw IoError("moment csv row " + std::to_string(line_no) + ": unknown flag '" + std::string(f[4]) + "'");
        }
        pending.push_back(cell);
        if (pending.size() == keys.size()) {
            try {
                table.add_row(pending_t, pending);
            } catch (const DomainError& e) {
                throw IoError("moment csv row " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    if (!have_header) throw IoError("moment csv: missing header");
    if (!pending.empty() && pending.size() != keys.size()) throw IoError("moment csv: truncated final time block");
    return table;
}

void write_moment_csv(const MomentTable& table, const std::string& path)
{
    const std::string text = moment_csv_text(table);
    write_file(path, text.data(), text.size());
}

MomentTable read_moment_csv(const std::string& path) { return parse_moment_csv(read_file(path)); }

std::vector<std::uint8_t> snapshot_bytes(const ParticleEnsemble& ens)
{
    std::vector<std::uint8_t> out{'K', 'M', 'E', 'N'};
    put_le<std::uint16_t>(out, kSnapshotVersion);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(ens.d));
    put_le<std::uint64_t>(out, ens.size());
    put_le<double>(out, ens.time);
    const auto state = ens.seed_state();
    put_le<std::uint64_t>(out, state.size());
    out.insert(out.end(), state.begin(), state.end());
    for (double v : ens.velocities) put_le<double>(out, v);
    return out;
}

ParticleEnsemble restore_bytes(const std::vector<std::uint8_t>& bytes)
{
    Reader r(bytes);
    r.need(4);
    if (std::memcmp(r.here(), "KMEN", 4) != 0) throw IoError("snapshot: bad magic");
    r.skip(4);
    const auto version = r.get<std::uint16_t>();
    if (version != kSnapshotVersion) throw IoError("snapshot: unsupported version " + std::to_string(version));
    const auto d = r.get<std::uint16_t>();
    if (d < 1 || d > 3) throw IoError("snapshot: invalid dimension " + std::to_string(d));
    const auto n = r.get<std::uint64_t>();
    const double time = r.get<double>();
    const auto state_len = r.get<std::uint64_t>();
    if (state_len > r.remaining()) throw IoError("snapshot truncated in the random state");
    std::vector<std::uint8_t> state(r.here(), r.here() + state_len);
    r.skip(static_cast<std::size_t>(state_len));
    if (n > r.remaining() / 8 / d || r.remaining() != n * d * 8) {
        throw IoError("snapshot: velocity block has " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(n * d * 8));
    }
    ParticleEnsemble ens;
    ens.d = d;
    ens.time = time;
    ens.set_seed_state(state);
    ens.velocities.resize(static_cast<std::size_t>(n) * d);
    for (double& v : ens.velocities) v = r.get<double>();
    return ens;
}

void snapshot(const ParticleEnsemble& ens, const std::string& path)
{
    const auto bytes = snapshot_bytes(ens);
    write_file(path, bytes.data(), bytes.size());
}

ParticleEnsemble restore(const std::string& path)
{
    const std::string text = read_file(path);
    return restore_bytes(std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_json(const RunManifest& m)
{
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path)
{
    const std::string text = manifest_json(manifest);
    write_file(path, text.data(), text.size());
}

}  // namespace kmlab
