#include "kmlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <openssl/evp.h>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;  // 0 for command line overrides
};

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) : "override"; }

struct Lexed {
    std::vector<Entry> entries;
    std::map<std::string, int> section_lines;
    std::vector<std::string> errors;
};

const std::vector<std::string>& known_sections()
{
    static const std::vector<std::string> s{"scenario", "kernel",   "initial",   "diagnostics",
                                            "hierarchy", "recipe", "constants", "output"};
    return s;
}

void put_entry(Lexed& lx, Entry e)
{
    for (auto& old : lx.entries) {
        if (old.section == e.section && old.key == e.key) {
            if (e.line > 0 && old.line > 0) {
                lx.errors.push_back(where(e.line) + ": duplicate key '" + e.section + "." + e.key +
                                    "' (first set on line " + std::to_string(old.line) + ")");
                return;
            }
            old = std::move(e);
            return;
        }
    }
    lx.entries.push_back(std::move(e));
}

Lexed lex(std::string_view text, std::span<const std::string> overrides)
{
    Lexed lx;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::size_t hash = raw.find('#');
        const std::string line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                lx.errors.push_back(where(line_no) + ": malformed section header");
                continue;
            }
            section = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
            const auto& ks = known_sections();
            if (std::find(ks.begin(), ks.end(), section) == ks.end()) {
                lx.errors.push_back(where(line_no) + ": unknown section [" + section + "]");
            }
            lx.section_lines.emplace(section, line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            lx.errors.push_back(where(line_no) + ": expected 'key = value'");
            continue;
        }
        if (section.empty()) {
            lx.errors.push_back(where(line_no) + ": key outside of any section");
            continue;
        }
        put_entry(lx, {section, lower(trim(std::string_view(line).substr(0, eq))),
                       trim(std::string_view(line).substr(eq + 1)), line_no});
    }
    for (const auto& o : overrides) {
        const std::size_t eq = o.find('=');
        const std::size_t dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            lx.errors.push_back("override '" + o + "': expected section.key=value");
            continue;
        }
        put_entry(lx, {lower(trim(std::string_view(o).substr(0, dot))),
                       lower(trim(std::string_view(o).substr(dot + 1, eq - dot - 1))),
                       trim(std::string_view(o).substr(eq + 1)), 0});
    }
    return lx;
}

struct ValueError {
    std::string message;
};

double to_double(const std::string& s)
{
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (b != e && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw ValueError{"'" + s + "' is not a number"};
    return v;
}

double to_finite(const std::string& s)
{
    const double v = to_double(s);
    if (!std::isfinite(v)) throw ValueError{"'" + s + "' is not finite"};
    return v;
}

long long to_integer(const std::string& s)
{
    const double v = to_finite(s);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ValueError{"'" + s + "' is not an integer"};
    return static_cast<long long>(v);
}

std::uint64_t to_u64(const std::string& s)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ValueError{"'" + s + "' is not an unsigned integer"};
    return v;
}

bool to_bool(const std::string& s)
{
    const std::string l = lower(s);
    if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
    if (l == "false" || l == "no" || l == "0" || l == "off") return false;
    throw ValueError{"'" + s + "' is not a boolean"};
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<double> to_list(const std::string& s)
{
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(to_finite(tok));
    if (out.empty()) throw ValueError{"empty list"};
    return out;
}

std::vector<std::vector<double>> to_groups(const std::string& s)
{
    std::vector<std::vector<double>> out;
    for (const auto& g : split(s, ';')) out.push_back(to_list(g));
    return out;
}

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs, const char* sep = ", ")
{
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        s += fmt(xs[i]);
    }
    return s;
}

std::string fmt_groups(const std::vector<std::vector<double>>& gs)
{
    std::string s;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (i) s += "; ";
        s += fmt_list(gs[i], " ");
    }
    return s;
}

// Raw settings collected before the dependent objects can be built.
struct Draft {
    std::string model = "kac";
    std::optional<int> d;
    std::string profile = "constant";
    double level = 1.0;
    double nu = 0.0;
    double theta_min = 0.0;
    std::string law = "gaussian";
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> stddevs;
    double radius = 1.0;
    std::vector<std::vector<double>> points;
    std::vector<double> exp_s, exp_alpha, ml_s, ml_alpha;
};

using Setter = std::function<void(RunConfig&, Draft&, const std::string&)>;

const std::map<std::string, Setter>& schema()
{
    static const std::map<std::string, Setter> s{
        {"scenario.model",
         [](RunConfig&, Draft& d, const std::string& v) {
             const std::string m = lower(v);
             if (m != "kac" && m != "boltzmann") throw ValueError{"model must be 'kac' or 'boltzmann'"};
             d.model = m;
         }},
        {"scenario.d",
         [](RunConfig&, Draft& d, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 1 || x > 3) throw ValueError{"d must be 1, 2 or 3"};
             d.d = static_cast<int>(x);
         }},
        {"scenario.n",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 2 || x % 2 != 0) throw ValueError{"n must be even and at least 2"};
             c.scenario.n = static_cast<std::size_t>(x);
         }},
        {"scenario.dt",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x > 0.0)) throw ValueError{"dt must be > 0"};
             c.scenario.dt = x;
         }},
        {"scenario.t_end",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x >= 0.0)) throw ValueError{"t_end must be >= 0"};
             c.scenario.t_end = x;
         }},
        {"scenario.seed", [](RunConfig& c, Draft&, const std::string& v) { c.scenario.seed = to_u64(v); }},
        {"scenario.max_collision_probability",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x > 0.0 && x <= 1.0)) throw ValueError{"must lie in (0, 1]"};
             c.scenario.max_collision_probability = x;
         }},
        {"scenario.threads",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 0 || x > 256) throw ValueError{"threads must lie in [0, 256]"};
             c.scenario.threads = static_cast<unsigned>(x);
         }},
        {"kernel.profile",
         [](RunConfig&, Draft& d, const std::string& v) {
             const std::string p = lower(v);
             if (p != "constant" && p != "power") throw ValueError{"profile must be 'constant' or 'power'"};
             d.profile = p;
         }},
        {"kernel.level", [](RunConfig&, Draft& d, const std::string& v) { d.level = to_finite(v); }},
        {"kernel.nu", [](RunConfig&, Draft& d, const std::string& v) { d.nu = to_finite(v); }},
        {"kernel.theta_min", [](RunConfig&, Draft& d, const std::string& v) { d.theta_min = to_finite(v); }},
        {"initial.law",
         [](RunConfig&, Draft& d, const std::string& v) {
             const std::string l = lower(v);
             if (l != "gaussian" && l != "uniform_ball" && l != "point_masses") {
                 throw ValueError{"law must be gaussian, uniform_ball or point_masses"};
             }
             d.law = l;
         }},
        {"initial.weights", [](RunConfig&, Draft& d, const std::string& v) { d.weights = to_list(v); }},
        {"initial.mean", [](RunConfig&, Draft& d, const std::string& v) { d.means = to_groups(v); }},
        {"initial.stddev", [](RunConfig&, Draft& d, const std::string& v) { d.stddevs = to_groups(v); }},
        {"initial.radius", [](RunConfig&, Draft& d, const std::string& v) { d.radius = to_finite(v); }},
        {"initial.points", [](RunConfig&, Draft& d, const std::string& v) { d.points = to_groups(v); }},
        {"diagnostics.orders",
         [](RunConfig& c, Draft&, const std::string& v) {
             c.scenario.diagnostics.orders.clear();
             for (double x : to_list(v)) {
                 if (x != std::floor(x)) throw ValueError{"orders must be integers"};
                 c.scenario.diagnostics.orders.push_back(static_cast<int>(x));
             }
         }},
        {"diagnostics.cadence",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x >= 0.0)) throw ValueError{"cadence must be >= 0"};
             c.scenario.diagnostics.cadence = x;
         }},
        {"diagnostics.exp_s", [](RunConfig&, Draft& d, const std::string& v) { d.exp_s = to_list(v); }},
        {"diagnostics.exp_alpha", [](RunConfig&, Draft& d, const std::string& v) { d.exp_alpha = to_list(v); }},
        {"diagnostics.ml_s", [](RunConfig&, Draft& d, const std::string& v) { d.ml_s = to_list(v); }},
        {"diagnostics.ml_alpha", [](RunConfig&, Draft& d, const std::string& v) { d.ml_alpha = to_list(v); }},
        {"diagnostics.component_moments",
         [](RunConfig& c, Draft&, const std::string& v) { c.scenario.diagnostics.component_moments = to_bool(v); }},
        {"diagnostics.max_order",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 2 || x % 2 != 0) throw ValueError{"max_order must be even and >= 2"};
             c.scenario.max_order = static_cast<int>(x);
         }},
        {"hierarchy.q_max",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 1 || x > 64) throw ValueError{"q_max must lie in [1, 64]"};
             c.hierarchy.q_max = static_cast<int>(x);
         }},
        {"hierarchy.t_end",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x >= 0.0)) throw ValueError{"t_end must be >= 0"};
             c.hierarchy.t_end = x;
         }},
        {"hierarchy.samples",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 1) throw ValueError{"samples must be >= 1"};
             c.hierarchy.samples = static_cast<std::size_t>(x);
         }},
        {"hierarchy.variant",
         [](RunConfig& c, Draft&, const std::string& v) {
             const std::string x = lower(v);
             if (x == "rigorous") c.hierarchy.variant = CqVariant::Rigorous;
             else if (x == "epsilon_free") c.hierarchy.variant = CqVariant::EpsilonFree;
             else if (x == "epsilon_weighted") c.hierarchy.variant = CqVariant::EpsilonWeighted;
             else throw ValueError{"variant must be rigorous, epsilon_free or epsilon_weighted"};
         }},
        {"recipe.s",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x > 0.0 && x < 2.0)) throw ValueError{"s must lie in (0, 2)"};
             c.recipe.s = x;
         }},
        {"recipe.alpha0",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x > 0.0)) throw ValueError{"alpha0 must be > 0"};
             c.recipe.alpha0 = x;
         }},
        {"recipe.q_max",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 3 || x > 1000000) throw ValueError{"q_max must lie in [3, 1000000]"};
             c.recipe.q_max = static_cast<int>(x);
         }},
        {"recipe.m0",
         [](RunConfig& c, Draft&, const std::string& v) {
             const double x = to_finite(v);
             if (!(x > 0.0)) throw ValueError{"M0 must be > 0"};
             c.recipe.M0 = x;
         }},
        {"constants.q_max",
         [](RunConfig& c, Draft&, const std::string& v) {
             const long long x = to_integer(v);
             if (x < 2 || x > 5000) throw ValueError{"q_max must lie in [2, 5000]"};
             c.constants.q_max = static_cast<int>(x);
         }},
        {"output.csv", [](RunConfig& c, Draft&, const std::string& v) { c.output.csv = v; }},
        {"output.snapshot", [](RunConfig& c, Draft&, const std::string& v) { c.output.snapshot = v; }},
        {"output.manifest", [](RunConfig& c, Draft&, const std::string& v) { c.output.manifest = v; }},
        {"output.resume", [](RunConfig& c, Draft&, const std::string& v) { c.output.resume = v; }},
    };
    return s;
}

std::vector<MLSpec> make_specs(const std::vector<double>& s, const std::vector<double>& alpha, const char* what)
{
    if (s.size() != alpha.size()) {
        throw ValueError{std::string(what) + "_s and " + what + "_alpha must have the same length"};
    }
    std::vector<MLSpec> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        try {
            out.emplace_back(s[i], alpha[i]);
        } catch (const DomainError& e) {
            throw ValueError{e.what()};
        }
    }
    return out;
}

InitialLaw make_law(const Draft& dr, int d)
{
    InitialLaw law;
    if (dr.law == "uniform_ball") {
        law = InitialLaw::uniform_ball(dr.radius);
    } else if (dr.law == "point_masses") {
        if (dr.points.empty()) throw ValueError{"point_masses needs 'points'"};
        law = InitialLaw::point_masses(dr.points);
    } else {
        const std::size_t count = std::max({dr.weights.size(), dr.means.size(), dr.stddevs.size(), std::size_t{1}});
        auto pick = [count](std::size_t n, const char* key) {
            if (n != 0 && n != 1 && n != count) {
                throw ValueError{std::string(key) + " must give 1 or " + std::to_string(count) + " components"};
            }
        };
        pick(dr.weights.size(), "weights");
        pick(dr.means.size(), "mean");
        pick(dr.stddevs.size(), "stddev");
        law.components.clear();
        for (std::size_t i = 0; i < count; ++i) {
            GaussianComponent c;
            c.weight = dr.weights.empty() ? 1.0 : dr.weights[dr.weights.size() == 1 ? 0 : i];
            if (!dr.means.empty()) c.mean = dr.means[dr.means.size() == 1 ? 0 : i];
            c.stddev = dr.stddevs.empty() ? std::vector<double>{1.0} : dr.stddevs[dr.stddevs.size() == 1 ? 0 : i];
            if (!c.mean.empty() && c.mean.size() != static_cast<std::size_t>(d)) {
                throw ValueError{"mean must have d = " + std::to_string(d) + " entries"};
            }
            law.components.push_back(std::move(c));
        }
    }
    return law;
}

void check_order_warning(RunConfig& c, double s, const char* what)
{
    const double xi = classify_singularity(c.scenario.kernel);
    const double limit = max_admissible_order(c.scenario.kernel);
    if (s > limit * (1.0 + 1e-12)) {
        c.warnings.push_back(std::string(what) + " s = " + fmt(s) + " exceeds 4/(2+" + fmt(xi) + ") = " + fmt(limit) +
                             " for this kernel; run permitted for exploration");
    }
}

}  // namespace

RunConfig parse_config(std::string_view text, std::span<const std::string> overrides)
{
    Lexed lx = lex(text, overrides);
    std::vector<std::string>& errors = lx.errors;
    RunConfig cfg;
    Draft dr;
    std::map<std::string, int> key_lines;

    for (const auto& e : lx.entries) {
        const std::string full = e.section + "." + e.key;
        key_lines[full] = e.line;
        const auto it = schema().find(full);
        if (it == schema().end()) {
            errors.push_back(where(e.line) + ": unknown key '" + full + "'");
            continue;
        }
        try {
            it->second(cfg, dr, e.value);
        } catch (const ValueError& err) {
            errors.push_back(where(e.line) + ": " + full + ": " + err.message);
        }
    }

    auto line_of = [&](const std::string& key, const std::string& section) {
        if (auto it = key_lines.find(key); it != key_lines.end()) return where(it->second);
        if (auto it = lx.section_lines.find(section); it != lx.section_lines.end()) return where(it->second);
        return std::string("line 0");
    };

    if (!key_lines.count("scenario.model")) {
        errors.push_back(line_of("scenario.model", "scenario") + ": missing required key 'scenario.model'");
    }

    const bool kac = dr.model == "kac";
    int d = kac ? 1 : 3;
    if (dr.d) {
        if (kac && *dr.d != 1) {
            errors.push_back(line_of("scenario.d", "scenario") + ": model kac requires d = 1");
        } else if (!kac && *dr.d == 1) {
            errors.push_back(line_of("scenario.d", "scenario") + ": model boltzmann requires d = 2 or 3");
        } else {
            d = *dr.d;
        }
    }

    bool kernel_ok = false;
    try {
        const Profile profile = dr.profile == "power" ? Profile::PowerSingular : Profile::Constant;
        cfg.scenario.kernel =
            AngularKernel(kac ? Family::Kac : Family::Boltzmann, d, profile, dr.level, dr.nu, dr.theta_min);
        kernel_ok = true;
        if (cfg.scenario.kernel.is_unbounded()) {
            errors.push_back(line_of("kernel.theta_min", "kernel") +
                             ": untruncated singular kernel (power profile needs theta_min > 0)");
            kernel_ok = false;
        }
    } catch (const std::exception& e) {
        errors.push_back(line_of("kernel.profile", "kernel") + ": " + e.what());
    }

    try {
        cfg.scenario.initial = make_law(dr, d);
    } catch (const ValueError& e) {
        errors.push_back(line_of("initial.law", "initial") + ": " + e.message);
    }
    try {
        cfg.scenario.diagnostics.exp_specs = make_specs(dr.exp_s, dr.exp_alpha, "exp");
        cfg.scenario.diagnostics.ml_specs = make_specs(dr.ml_s, dr.ml_alpha, "ml");
    } catch (const ValueError& e) {
        errors.push_back(line_of("diagnostics.exp_s", "diagnostics") + ": " + e.message);
    }

    if (kernel_ok && errors.empty()) {
        try {
            cfg.scenario.dt = validate_scenario(cfg.scenario);
        } catch (const ConfigError& e) {
            errors.push_back(line_of("scenario.dt", "scenario") + ": " + e.what());
        }
    }

    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
        throw ConfigError(msg);
    }

    check_order_warning(cfg, cfg.recipe.s, "recipe");
    for (const auto& spec : cfg.scenario.diagnostics.exp_specs) check_order_warning(cfg, spec.s(), "diagnostic");
    for (const auto& spec : cfg.scenario.diagnostics.ml_specs) check_order_warning(cfg, spec.s(), "diagnostic");
    return cfg;
}

RunConfig load_config(const std::string& path, std::span<const std::string> overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

bool apply_environment(RunConfig& config)
{
    const char* env = std::getenv("KM_SEED");
    if (env == nullptr || *env == '\0') return false;
    try {
        config.scenario.seed = to_u64(trim(env));
    } catch (const ValueError& e) {
        throw ConfigError("KM_SEED: " + e.message);
    }
    return true;
}

std::string canonical_config(std::string_view text, std::span<const std::string> overrides)
{
    const Lexed lx = lex(text, overrides);
    std::vector<std::string> lines;
    for (const auto& e : lx.entries) {
        std::string v;
        bool space = false;
        for (char c : e.value) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                space = true;
                continue;
            }
            if (c == ',' || c == ';') {
                v += c;
                space = false;
                continue;
            }
            if (space && !v.empty() && v.back() != ',' && v.back() != ';') v += ' ';
            space = false;
            v += c;
        }
        lines.push_back(e.section + "." + e.key + "=" + v);
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::string config_hash(std::string_view text, std::span<const std::string> overrides)
{
    const std::string canon = canonical_config(text, overrides);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(canon.data(), canon.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("config_hash: SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string to_config_text(const RunConfig& c)
{
    const ScenarioConfig& s = c.scenario;
    const AngularKernel& k = s.kernel;
    std::ostringstream o;
    o << "[scenario]\n";
    o << "model = " << (k.family() == Family::Kac ? "kac" : "boltzmann") << "\n";
    o << "d = " << k.dimension() << "\n";
    o << "n = " << s.n << "\n";
    o << "dt = " << fmt(s.dt) << "\n";
    o << "t_end = " << fmt(s.t_end) << "\n";
    o << "seed = " << s.seed << "\n";
    o << "max_collision_probability = " << fmt(s.max_collision_probability) << "\n";
    o << "threads = " << s.threads << "\n";
    o << "\n[kernel]\n";
    o << "profile = " << (k.profile() == Profile::Constant ? "constant" : "power") << "\n";
    o << "level = " << fmt(k.level()) << "\n";
    o << "nu = " << fmt(k.nu()) << "\n";
    o << "theta_min = " << fmt(k.theta_min()) << "\n";
    o << "\n[initial]\n";
    const InitialLaw& law = s.initial;
    switch (law.kind) {
    case InitialLaw::Kind::GaussianMixture: {
        o << "law = gaussian\n";
        std::vector<double> w;
        std::vector<std::vector<double>> means;
        std::vector<std::vector<double>> sds;
        bool any_mean = false;
        for (const auto& comp : law.components) {
            w.push_back(comp.weight);
            any_mean = any_mean || !comp.mean.empty();
            means.push_back(comp.mean.empty() ? std::vector<double>(static_cast<std::size_t>(k.dimension()), 0.0)
                                              : comp.mean);
            sds.push_back(comp.stddev);
        }
        o << "weights = " << fmt_list(w) << "\n";
        if (any_mean) o << "mean = " << fmt_groups(means) << "\n";
        o << "stddev = " << fmt_groups(sds) << "\n";
        break;
    }
    case InitialLaw::Kind::UniformBall:
        o << "law = uniform_ball\nradius = " << fmt(law.radius) << "\n";
        break;
    case InitialLaw::Kind::PointMasses:
        o << "law = point_masses\npoints = " << fmt_groups(law.points) << "\n";
        break;
    }
    const Diagnostics& dg = s.diagnostics;
    o << "\n[diagnostics]\n";
    std::vector<double> orders(dg.orders.begin(), dg.orders.end());
    if (!orders.empty()) o << "orders = " << fmt_list(orders) << "\n";
    o << "cadence = " << fmt(dg.cadence) << "\n";
    o << "component_moments = " << (dg.component_moments ? "true" : "false") << "\n";
    o << "max_order = " << s.max_order << "\n";
    auto specs = [&o](const std::vector<MLSpec>& v, const char* name) {
        if (v.empty()) return;
        std::vector<double> ss;
        std::vector<double> as;
        for (const auto& x : v) {
            ss.push_back(x.s());
            as.push_back(x.alpha());
        }
        o << name << "_s = " << fmt_list(ss) << "\n" << name << "_alpha = " << fmt_list(as) << "\n";
    };
    specs(dg.exp_specs, "exp");
    specs(dg.ml_specs, "ml");
    o << "\n[hierarchy]\n";
    o << "q_max = " << c.hierarchy.q_max << "\n";
    o << "t_end = " << fmt(c.hierarchy.t_end) << "\n";
    o << "samples = " << c.hierarchy.samples << "\n";
    o << "variant = "
      << (c.hierarchy.variant == CqVariant::Rigorous      ? "rigorous"
          : c.hierarchy.variant == CqVariant::EpsilonFree ? "epsilon_free"
                                                           : "epsilon_weighted")
      << "\n";
    o << "\n[recipe]\n";
    o << "s = " << fmt(c.recipe.s) << "\n";
    o << "alpha0 = " << fmt(c.recipe.alpha0) << "\n";
    o << "q_max = " << c.recipe.q_max << "\n";
    if (c.recipe.M0) o << "m0 = " << fmt(*c.recipe.M0) << "\n";
    o << "\n[constants]\n";
    o << "q_max = " << c.constants.q_max << "\n";
    const OutputSettings& out = c.output;
    if (!out.csv.empty() || !out.snapshot.empty() || !out.manifest.empty() || !out.resume.empty()) {
        o << "\n[output]\n";
        if (!out.csv.empty()) o << "csv = " << out.csv << "\n";
        if (!out.snapshot.empty()) o << "snapshot = " << out.snapshot << "\n";
        if (!out.manifest.empty()) o << "manifest = " << out.manifest << "\n";
        if (!out.resume.empty()) o << "resume = " << out.resume << "\n";
    }
    return o.str();
}

}  // namespace kmlab
