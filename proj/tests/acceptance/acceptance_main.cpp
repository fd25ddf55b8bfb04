// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kmlab/collisions.hpp"
#include "kmlab/config.hpp"
#include "kmlab/dsmc.hpp"
#include "kmlab/errors.hpp"
#include "kmlab/hierarchy.hpp"
#include "kmlab/kernels.hpp"
#include "kmlab/lemma_lab.hpp"
#include "kmlab/moments.hpp"
#include "kmlab/persistence.hpp"
#include "kmlab/rng.hpp"
#include "kmlab/special_fn.hpp"

#ifdef KMLAB_HAVE_CLI
#include "cli.hpp"
#endif

using namespace kmlab;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void note(Outcome& o, const std::string& s)
{
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += s;
}

// 1: collision invariants

Outcome conservation()
{
    Outcome o;
    Rng rng(1001);
    const int n = 1000000;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = rng.uniform(-10, 10);
        double w = rng.uniform(-10, 10);
        const double e0 = v * v + w * w;
        kac_collide_inplace(v, w, rng.uniform(-pi, pi));
        worst = std::max(worst, std::abs(v * v + w * w - e0) / e0);
    }
    note(o, "kac energy " + fmt("%.2e", worst));
    o.pass = o.pass && worst <= 1e-13;

    for (int d : {2, 3}) {
        double worst_e = 0.0;
        double worst_p = 0.0;
        double v[3], w[3], u[3], sigma[3];
        const auto du = static_cast<std::size_t>(d);
        for (int i = 0; i < n; ++i) {
            double n2 = 0.0;
            double e0 = 0.0;
            double p0[3];
            for (int j = 0; j < d; ++j) {
                v[j] = rng.uniform(-10, 10);
                w[j] = rng.uniform(-10, 10);
                u[j] = v[j] - w[j];
                n2 += u[j] * u[j];
                e0 += v[j] * v[j] + w[j] * w[j];
                p0[j] = v[j] + w[j];
            }
            if (n2 == 0.0) continue;
            for (int j = 0; j < d; ++j) u[j] /= std::sqrt(n2);
            const double phi = d == 2 ? (rng.uniform() < 0.5 ? 0.0 : pi) : rng.uniform(0, 2 * pi);
            scattering_direction(std::span<const double>(u, du), rng.uniform(0, pi), phi, std::span<double>(sigma, du));
            boltzmann_collide_inplace(std::span<double>(v, du), std::span<double>(w, du),
                                      std::span<const double>(sigma, du));
            double e1 = 0.0;
            for (int j = 0; j < d; ++j) {
                e1 += v[j] * v[j] + w[j] * w[j];
                // momentum error relative to the pair's speed scale
                worst_p = std::max(worst_p, std::abs(v[j] + w[j] - p0[j]) / std::sqrt(e0));
            }
            worst_e = std::max(worst_e, std::abs(e1 - e0) / e0);
        }
        note(o, "boltzmann d=" + std::to_string(d) + " energy " + fmt("%.2e", worst_e) + " momentum " +
                    fmt("%.2e", worst_p));
        o.pass = o.pass && worst_e <= 1e-13 && worst_p <= 1e-13;
    }
    return o;
}

// 2: kernel constants

Outcome constants()
{
    Outcome o;
    const double c1 = c1_constant(AngularKernel::kac_constant(1.0));
    const double c2 = c2_constant(AngularKernel::boltzmann_constant(3, 1.0));
    note(o, "|C1 - pi| " + fmt("%.2e", std::abs(c1 - pi)));
    note(o, "|C2 - 8pi/3| " + fmt("%.2e", std::abs(c2 - 8 * pi / 3)));
    o.pass = std::abs(c1 - pi) <= 1e-9 && std::abs(c2 - 8 * pi / 3) <= 1e-9;
    double worst = 0.0;
    for (const auto& k : {AngularKernel::kac_constant(), AngularKernel::kac_power(1.0), AngularKernel::kac_power(1.5, 1.0, 0.02),
                          AngularKernel::boltzmann_constant(3), AngularKernel::boltzmann_power(3, 1.0),
                          AngularKernel::boltzmann_constant(2)}) {
        worst = std::max(worst, std::abs(epsilon_q(k, 2) - 1.0));
    }
    note(o, "max |eps_2 - 1| " + fmt("%.2e", worst));
    o.pass = o.pass && worst <= 1e-10;
    return o;
}

// 3: decay of the cancellation sequence

Outcome decay()
{
    Outcome o;
    for (double xi : {0.0, 0.5, 1.0, 1.5}) {
        for (int fam = 0; fam < 2; ++fam) {
            const AngularKernel k =
                fam == 0 ? (xi == 0.0 ? AngularKernel::kac_constant() : AngularKernel::kac_power(xi))
                         : (xi == 0.0 ? AngularKernel::boltzmann_constant(3) : AngularKernel::boltzmann_power(3, xi));
            double prev = std::numeric_limits<double>::infinity();
            bool monotone = true;
            double first = 0.0;
            double last = 0.0;
            for (int q = 20; q <= 200; ++q) {
                const double x = epsilon_q(k, q) * std::pow(static_cast<double>(q), 1.0 - xi / 2.0);
                monotone = monotone && x < prev;
                prev = x;
                if (q == 20) first = x;
                last = x;
            }
            const bool halved = last < 0.5 * first;
            note(o, std::string(fam == 0 ? "kac" : "boltzmann3") + " xi=" + fmt("%.1f", xi) + " ratio " +
                        fmt("%.3f", last / first) + (monotone ? "" : " non-monotone"));
            o.pass = o.pass && monotone && halved;
        }
    }
    return o;
}

// 4: angular averaging inequality

Outcome angular()
{
    Outcome o;
    AngularSweep sweep;  // 1e4 trials, q in [2, 20], v in [-10, 10]
    double odd = 0.0;
    auto add = [&](const char* name, const AngularSweepResult& r) {
        note(o, std::string(name) + " violations " + std::to_string(r.report.violations) + "/" +
                    std::to_string(r.report.trials) + " flagged " + std::to_string(r.report.flagged) +
                    " worst rel margin " + fmt("%.3g", r.report.worst_relative_margin));
        o.pass = o.pass && r.report.passed();
        odd = std::max(odd, r.max_odd_term);
    };
    add("kac/constant", sweep_angular_kac(AngularKernel::kac_constant(1.0), sweep));
    add("kac/power(1) theta_min=0.05", sweep_angular_kac(AngularKernel::kac_power(1.0, 1.0, 0.05), sweep));
    add("boltzmann d=3/constant", sweep_angular_boltzmann(AngularKernel::boltzmann_constant(3, 1.0), sweep));
    note(o, "max odd term " + fmt("%.2e", odd));
    o.pass = o.pass && odd <= 1e-12;
    return o;
}

// 5: appendix inequalities

Outcome appendix()
{
    Outcome o;
    for (const auto& r : {sweep_convex_estimate(1e-12), sweep_binomial_split(1e-10), sweep_product_monotonicity(100000, 7, 1e-10)}) {
        note(o, r.id + " violations " + std::to_string(r.violations) + "/" + std::to_string(r.trials));
        o.pass = o.pass && r.passed();
    }
    for (double a : {1.25, 1.5, 2.0, 3.0}) {
        const auto r = check_beta_sum_decay(a, 400);
        note(o, "a=" + fmt("%.2f", a) + " slope " + fmt("%.3f", r.slope));
        o.pass = o.pass && r.slope <= -(1.0 + a) + 0.15;
    }
    return o;
}

// 6: Mittag-Leffler

Outcome mittag_leffler_checks()
{
    Outcome o;
    double e1 = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        const double x = 0.01 * i;
        e1 = std::max(e1, std::abs(mittag_leffler(1.0, x).value - std::exp(x)) / std::exp(x));
    }
    double e2 = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = 0.01 * i;
        const double ref = std::cosh(std::sqrt(x));
        e2 = std::max(e2, std::abs(mittag_leffler(2.0, x).value - ref) / ref);
    }
    bool at_zero = true;
    for (double a : {1.0, 1.25, 4.0 / 3.0, 1.5, 2.0, 3.0, 7.5}) at_zero = at_zero && mittag_leffler(a, 0.0).value == 1.0;
    note(o, "E1 rel err " + fmt("%.2e", e1));
    note(o, "E2 rel err " + fmt("%.2e", e2));
    note(o, std::string("E_a(0) == 1 ") + (at_zero ? "yes" : "no"));
    o.pass = e1 <= 1e-12 && e2 <= 1e-10 && at_zero;
    return o;
}

// 7: stretched exponential moment along DSMC runs with the recipe's alpha

struct Band {
    std::vector<double> t, value, se;
    double alpha = 0.0;
    double log_alpha = 0.0;
    int q0 = 0;
};

RecipeResult recipe_for(const ScenarioConfig& sc, double s, double alpha0)
{
    const ParticleEnsemble ens = init_ensemble(sc);
    const AngularKernel& k = sc.kernel;
    RecipeInput in;
    in.s = s;
    in.alpha0 = alpha0;
    in.singularity_index = classify_singularity(k);
    in.log_m_init = log_even_moments(ens, in.q_max);
    in.constants = {angular_constant(k), epsilon_vector(k, 200), CqVariant::Rigorous};
    in.epsilon = [&k](int q) { return epsilon_q(k, q); };
    const MLSpec spec(s, alpha0);
    in.M0 = std::max(stretched_exp_moment(ens, spec).value, ml_moment(ens, spec).value);
    return alpha_recipe(in);
}

// M_{alpha,s}; alpha may have underflowed to 0, where every weight is exactly 1
MomentEstimate exp_moment(const ParticleEnsemble& ens, double s, double alpha)
{
    if (alpha > 0.0) return stretched_exp_moment(ens, MLSpec(s, alpha));
    std::vector<double> w(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) {
        double v2 = 0.0;
        for (double x : ens.particle(i)) v2 += x * x;
        w[i] = std::exp(alpha * std::pow(1.0 + v2, 0.5 * s));
    }
    return average_weights(w);
}

Band exp_band(double theta_min, double s, double alpha)
{
    ScenarioConfig sc;
    sc.kernel = AngularKernel::kac_power(1.0, 1.0, theta_min);
    sc.n = 50000;
    sc.t_end = 10.0;
    sc.seed = 2016;
    sc.diagnostics.orders = {2};
    Band b;
    ParticleEnsemble ens = init_ensemble(sc);
    const CollisionStepper stepper(sc.kernel, validate_scenario(sc), threads_from_env());
    const auto total = static_cast<std::uint64_t>(std::llround(sc.t_end / stepper.dt()));
    const auto every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(0.5 / stepper.dt())));
    for (;;) {
        if (ens.step % every == 0 || ens.step == total) {
            const auto m = exp_moment(ens, s, alpha);
            b.t.push_back(ens.time);
            b.value.push_back(m.value);
            b.se.push_back(m.std_err);
        }
        if (ens.step >= total) break;
        stepper(ens);
    }
    return b;
}

Outcome propagation()
{
    Outcome o;
    const double s = 4.0 / 3.0;
    std::vector<Band> bands;
    for (double tm : {0.05, 0.02}) {
        ScenarioConfig sc;
        sc.kernel = AngularKernel::kac_power(1.0, 1.0, tm);
        sc.n = 50000;
        sc.seed = 2016;
        const RecipeResult r = recipe_for(sc, s, 0.5);
        if (!r.feasible) {
            note(o, "recipe infeasible at theta_min=" + fmt("%.2f", tm) + ": " + r.diagnostics);
            o.pass = false;
            return o;
        }
        Band b = exp_band(tm, s, r.alpha);
        b.alpha = r.alpha;
        b.log_alpha = r.log_alpha;
        b.q0 = r.q0;
        double worst = 0.0;
        for (std::size_t i = 0; i < b.t.size(); ++i) {
            worst = std::max(worst, (b.value[i] - 3.0 * b.se[i]) / b.value[0]);
        }
        note(o, "theta_min=" + fmt("%.2f", tm) + " q0=" + std::to_string(r.q0) + " ln alpha=" + fmt("%.6g", r.log_alpha) +
                    " max (M - 3se)/M(0) " + fmt("%.4f", worst));
        o.pass = o.pass && worst <= 3.0;
        bands.push_back(std::move(b));
    }
    bool overlap = bands[0].t.size() == bands[1].t.size();
    for (std::size_t i = 0; overlap && i < bands[0].t.size(); ++i) {
        const double lo0 = bands[0].value[i] - 3 * bands[0].se[i];
        const double hi0 = bands[0].value[i] + 3 * bands[0].se[i];
        const double lo1 = bands[1].value[i] - 3 * bands[1].se[i];
        const double hi1 = bands[1].value[i] + 3 * bands[1].se[i];
        overlap = lo0 <= hi1 && lo1 <= hi0;
    }
    note(o, std::string("bands overlap ") + (overlap ? "yes" : "no"));
    o.pass = o.pass && overlap;
    if (bands[0].alpha == 0.0) note(o, "recipe alpha underflows double range, so M is identically 1");

    // not asserted: the same runs at alpha0 itself, and the control order s = 1.9
    for (double tm : {0.05, 0.02}) {
        const Band b = exp_band(tm, s, 0.5);
        note(o, "info alpha0=0.5 theta_min=" + fmt("%.2f", tm) + " M(10)/M(0) " + fmt("%.4f", b.value.back() / b.value[0]));
    }
    {
        ScenarioConfig sc;
        sc.kernel = AngularKernel::kac_power(1.0, 1.0, 0.05);
        sc.n = 50000;
        sc.seed = 2016;
        const RecipeResult r = recipe_for(sc, 1.9, 0.5);
        if (r.feasible) {
            const Band b = exp_band(0.05, 1.9, r.alpha);
            note(o, "info control s=1.9 ln alpha=" + fmt("%.6g", r.log_alpha) + " M(10)/M(0) " +
                        fmt("%.4f", b.value.back() / b.value[0]));
        } else {
            note(o, "info control s=1.9 recipe infeasible");
        }
        const Band g = exp_band(0.05, 1.9, 0.5);
        note(o, "info control s=1.9 alpha0=0.5 M(10)/M(0) " + fmt("%.4f", g.value.back() / g.value[0]));
    }
    return o;
}

// 8: moment system against DSMC

Outcome hierarchy_vs_dsmc()
{
    Outcome o;
    const AngularKernel k = AngularKernel::kac_constant(1.0);
    const int Q = 8;
    const double c = c1_constant(k);
    const auto eps = epsilon_vector(k, Q);
    for (int law = 0; law < 2; ++law) {
        ScenarioConfig sc;
        sc.kernel = k;
        sc.n = 50000;
        sc.seed = 808;
        sc.t_end = 50.0;
        sc.initial = law == 0 ? InitialLaw::gaussian(1.0) : InitialLaw::uniform_ball(3.0);
        sc.diagnostics.orders.clear();
        for (int q = 1; q <= Q; ++q) sc.diagnostics.orders.push_back(2 * q);
        sc.diagnostics.cadence = 0.25;
        const RunResult run_result = run(sc);
        const MomentTable& t = run_result.table;

        HierarchyState s0;
        s0.m.push_back(1.0);
        for (int q = 1; q <= Q; ++q) s0.m.push_back(t.at(0, order_key(2 * q)).value);
        s0.c = c;
        s0.eps = eps;
        std::vector<double> times;
        for (std::size_t r = 0; r < t.rows(); ++r) times.push_back(t.times()[r]);
        const Trajectory traj = integrate_hierarchy(s0, times);
        if (traj.blew_up || traj.times.size() != times.size()) {
            note(o, "hierarchy integration stopped early");
            o.pass = false;
            continue;
        }
        const auto cstar = uniform_bound(s0.m, {c, eps, CqVariant::Rigorous});

        double worst_ode = std::numeric_limits<double>::infinity();  // min (ODE - DSMC + 2 se) / se-scale
        std::size_t ode_fail = 0;
        std::size_t star_fail = 0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            for (int q = 1; q <= Q; ++q) {
                const auto& cell = t.at(r, order_key(2 * q));
                const double ode = traj.states[r][static_cast<std::size_t>(q)];
                if (t.times()[r] <= 5.0 + 1e-12) {
                    const double margin = ode - (cell.value - 2.0 * cell.std_err);
                    worst_ode = std::min(worst_ode, margin / std::max(cell.value, 1e-300));
                    if (margin < 0.0) ++ode_fail;
                }
                if (ode > cstar[static_cast<std::size_t>(q)] * (1 + 1e-9) || cell.value > cstar[static_cast<std::size_t>(q)]) {
                    ++star_fail;
                }
            }
        }
        note(o, std::string(law == 0 ? "gaussian" : "uniform ball") + ": ODE below DSMC-2se " + std::to_string(ode_fail) +
                    " cells, worst rel margin " + fmt("%.3g", worst_ode) + ", C* exceeded " + std::to_string(star_fail));
        o.pass = o.pass && ode_fail == 0 && star_fail == 0;
    }
    return o;
}

// 9: reproducibility and CLI contract

Outcome reproducibility()
{
    Outcome o;
    const std::string text =
        "[scenario]\nmodel = boltzmann\nd = 3\nn = 2000\nt_end = 1\nseed = 9\n"
        "[kernel]\nprofile = power\nnu = 0.5\ntheta_min = 0.1\n[diagnostics]\norders = 2 4\ncadence = 0.25\n";
    const RunConfig cfg = parse_config(text);
    const RunConfig again = parse_config(to_config_text(cfg));
    const bool round_trip = to_config_text(again) == to_config_text(cfg);
    note(o, std::string("config round trip ") + (round_trip ? "ok" : "differs"));

    const RunResult full = run(cfg.scenario);
    const RunResult same = run(cfg.scenario);
    const bool seeded = full.final_state == same.final_state && full.table == same.table;
    note(o, std::string("seed determinism ") + (seeded ? "ok" : "differs"));

    ScenarioConfig half = cfg.scenario;
    half.t_end = 0.5;
    const RunResult first = run(half);
    const auto path = (std::filesystem::temp_directory_path() / "kmlab_acceptance_snapshot.bin").string();
    snapshot(first.final_state, path);
    const RunResult resumed = run(cfg.scenario, restore(path));
    std::filesystem::remove(path);
    const bool resume_ok = resumed.final_state == full.final_state;
    note(o, std::string("snapshot resume ") + (resume_ok ? "bit-identical" : "differs"));
    o.pass = round_trip && seeded && resume_ok;

#ifdef KMLAB_HAVE_CLI
    const auto cfg_path = (std::filesystem::temp_directory_path() / "kmlab_acceptance.cfg").string();
    std::ofstream(cfg_path) << text;
    const auto bad_path = (std::filesystem::temp_directory_path() / "kmlab_acceptance_bad.cfg").string();
    std::ofstream(bad_path) << "[scenario]\nmodel = kac\nn = 7\n";
    std::ostringstream sink;
    auto code = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "kmlab");
        return kmlab::cli::cli_dispatch(args, sink, sink);
    };
    const int ok = code({"ml-eval", "--a", "1.5", "--x-grid", "0:10:5"});
    const int validation = code({"simulate", bad_path});
    const int unknown = code({"no-such-subcommand"});
    const int runtime = code({"simulate", cfg_path, "--resume", "/nonexistent/snapshot.bin"});
    std::filesystem::remove(cfg_path);
    std::filesystem::remove(bad_path);
    const bool codes = ok == 0 && validation == 1 && unknown == 1 && runtime == 2;
    note(o, "exit codes " + std::to_string(ok) + "/" + std::to_string(validation) + "/" + std::to_string(unknown) + "/" +
                std::to_string(runtime));
    o.pass = o.pass && codes;
#else
    note(o, "exit codes not checked: CLI not built");
    o.pass = false;
#endif
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "conservation", 10, conservation},
        {2, "kernel constants", 5, constants},
        {3, "cancellation decay", 120, decay},
        {4, "angular averaging inequality", 300, angular},
        {5, "appendix inequalities", 180, appendix},
        {6, "Mittag-Leffler numerics", 5, mittag_leffler_checks},
        {7, "exponential moment propagation", 600, propagation},
        {8, "moment system vs DSMC", 300, hierarchy_vs_dsmc},
        {9, "reproducibility and CLI", 60, reproducibility},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.pass = false;
            note(o, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= c.limit_s) {
            o.pass = false;
            note(o, "over the time limit");
        }
        std::printf("%s C%d %s (%.1fs < %.0fs): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
