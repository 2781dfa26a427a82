#include "fpcredit/mc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <span>
#include <sstream>
#include <thread>

#include "fpcredit/errors.hpp"

namespace fpcredit::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent substream per block so results do not depend on the worker count.
std::mt19937_64 block_rng(std::uint64_t seed, std::size_t block) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(block) + 1)));
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

KernelIsa resolve_isa(KernelChoice choice) {
    switch (choice) {
        case KernelChoice::Scalar:
            return KernelIsa::Scalar;
        case KernelChoice::Avx2:
            return KernelIsa::Avx2;
        case KernelChoice::Auto:
            break;
    }
    return best_isa();
}

template <typename BlockFn>
void run_blocks(std::size_t n_blocks, unsigned threads, BlockFn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < n_blocks; b = next++) fn(b);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

double ErsContract::annuity(const DiscountCurve& curve) const {
    double a = 0.0;
    for (std::size_t i = 1; i <= schedule.size(); ++i) a += schedule.accrual(i) * curve.discount(schedule.date(i));
    return a;
}

void ErsContract::validate() const {
    if (!(stock_count > 0.0)) throw DomainError("ERS: stock count must be positive");
    if (!(s0 > 0.0)) throw DomainError("ERS: S0 must be positive");
    if (!(equity_vol > 0.0)) throw DomainError("ERS: equity volatility must be positive");
    if (!(std::abs(correlation) <= 1.0)) throw DomainError("ERS: correlation must lie in [-1, 1]");
    if (!(recovery >= 0.0 && recovery < 1.0)) throw DomainError("ERS: recovery must lie in [0, 1)");
    if (!std::isfinite(dividend_yield) || !std::isfinite(spread)) throw DomainError("ERS: non-finite input");
    if (schedule.start() != 0.0) throw ConfigError("ERS must start at t = 0");
}

void SimulationConfig::validate() const {
    if (n_paths < 2) throw ConfigError("simulation needs at least 2 paths");
    if (steps_per_year < 12) throw ConfigError("simulation needs at least 12 steps per year");
    if (block_size < 2) throw ConfigError("simulation block size must be at least 2");
}

std::size_t SimulationOutput::defaulted() const {
    return static_cast<std::size_t>(
        std::count_if(paths.begin(), paths.end(), [](const PathRecord& p) { return p.defaulted; }));
}

std::vector<double> simulation_grid(double maturity, int steps_per_year,
                                    const std::vector<double>& bucket_ends, bool* refined) {
    if (!(maturity > 0.0)) throw DomainError("simulation grid: maturity must be positive");
    const auto n = static_cast<std::size_t>(std::ceil(maturity * steps_per_year - 1e-9));
    std::vector<double> grid;
    for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) / steps_per_year);
    grid.push_back(maturity);

    bool added = false;
    for (double e : bucket_ends) {
        if (!(e > 0.0 && e < maturity)) continue;
        auto it = std::lower_bound(grid.begin(), grid.end(), e);
        const bool near_hi = it != grid.end() && std::abs(*it - e) < 1e-12;
        const bool near_lo = it != grid.begin() && std::abs(*(it - 1) - e) < 1e-12;
        if (near_hi || near_lo) continue;
        grid.insert(it, e);
        added = true;
    }
    if (refined) *refined = added;
    return grid;
}

SimulationOutput simulate_joint_paths(const CreditModel& model, const ErsContract& ers,
                                      const DiscountCurve& curve, const SimulationConfig& cfg) {
    ers.validate();
    cfg.validate();

    std::vector<BarrierScenario> scenarios;
    double b_exp = 0.0;
    const VolatilityTermStructure* vols = nullptr;
    if (const auto* p = std::get_if<At1pParams>(&model)) {
        p->validate();
        scenarios = {{p->barrier_ratio, 1.0}};
        b_exp = p->b;
        vols = &p->vols;
    } else if (const auto* s = std::get_if<SbtvParams>(&model)) {
        s->validate();
        scenarios = s->scenarios;
        b_exp = s->b;
        vols = &s->vols;
    } else {
        throw DomainError("simulate_joint_paths needs an AT1P or SBTV model");
    }
    if (scenarios.size() > 255) throw DomainError("too many barrier scenarios");

    SimulationOutput out;
    const double maturity = ers.maturity();
    out.grid = simulation_grid(maturity, cfg.steps_per_year, vols->bucket_ends(), &out.grid_refined);
    if (out.grid_refined)
        out.log.push_back("time grid refined to place volatility bucket ends on grid points");
    out.isa = resolve_isa(cfg.kernel);
    const StepKernel kernel = kernel_for(out.isa);

    const std::size_t n_steps = out.grid.size() - 1;
    std::vector<StepCoefficients> coeffs(n_steps);
    std::vector<double> bridge_sd(n_steps);
    const double rho_bar = std::sqrt(std::max(0.0, 1.0 - ers.correlation * ers.correlation));
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t0 = out.grid[k];
        const double t1 = out.grid[k + 1];
        const double dt = t1 - t0;
        const double dvar = vols->cumulative_variance(t1) - vols->cumulative_variance(t0);
        StepCoefficients& c = coeffs[k];
        c.firm_drift = (b_exp - 0.5) * dvar;
        c.firm_vol = std::sqrt(dvar);
        c.equity_drift = std::log(curve.discount(t0) / curve.discount(t1)) -
                         (ers.dividend_yield + 0.5 * ers.equity_vol * ers.equity_vol) * dt;
        c.equity_vol = ers.equity_vol * std::sqrt(dt);
        c.rho = ers.correlation;
        c.rho_bar = rho_bar;
        c.bridge_scale = cfg.bridge_correction ? dvar : 0.0;
        bridge_sd[k] = 0.5 * c.equity_vol;
    }

    std::vector<double> cum_prob;
    double acc = 0.0;
    for (const auto& s : scenarios) cum_prob.push_back(acc += s.probability);

    out.paths.resize(cfg.n_paths);
    const std::size_t block = cfg.block_size + (cfg.block_size % 2);
    const std::size_t n_blocks = (cfg.n_paths + block - 1) / block;
    const double log_s0 = std::log(ers.s0);

    run_blocks(n_blocks, cfg.threads, [&](std::size_t blk) {
        const std::size_t first = blk * block;
        const std::size_t n = std::min(block, cfg.n_paths - first);
        std::mt19937_64 rng = block_rng(cfg.seed, blk);
        std::normal_distribution<double> normal;
        std::exponential_distribution<double> expo;
        std::uniform_real_distribution<double> unif;

        std::vector<double> x(n), x_next(n), s(n), s_next(n), z1(n), z2(n), ex(n);
        std::vector<std::uint8_t> alive(n, 1), event(n, 0);
        std::span<PathRecord> recs(out.paths.data() + first, n);

        for (std::size_t i = 0; i < n; ++i) {
            const double u = unif(rng);
            std::size_t sc = 0;
            while (sc + 1 < scenarios.size() && u >= cum_prob[sc]) ++sc;
            recs[i] = PathRecord{};
            recs[i].scenario = static_cast<std::uint8_t>(sc);
            x[i] = -std::log(scenarios[sc].barrier_ratio);
            s[i] = log_s0;
        }

        const std::size_t drawn = cfg.antithetic ? (n + 1) / 2 : n;
        for (std::size_t k = 0; k < n_steps; ++k) {
            for (std::size_t i = 0; i < drawn; ++i) z1[i] = normal(rng);
            for (std::size_t i = 0; i < drawn; ++i) z2[i] = normal(rng);
            for (std::size_t i = 0; i < drawn; ++i) ex[i] = expo(rng);
            if (cfg.antithetic) {
                for (std::size_t i = drawn; i < n; ++i) {
                    z1[i] = -z1[i - drawn];
                    z2[i] = -z2[i - drawn];
                    ex[i] = ex[i - drawn];
                }
            }
            kernel(coeffs[k], StepBuffers{x, s, z1, z2, ex, x_next, s_next, alive, event});

            for (std::size_t i = 0; i < n; ++i) {
                if (event[i] == kNoEvent) continue;
                PathRecord& r = recs[i];
                r.defaulted = true;
                if (event[i] == kGridHit) {
                    r.tau = out.grid[k + 1];
                    r.equity_at_default = std::exp(s_next[i]);
                } else {
                    // midpoint of the step, log S from its Brownian bridge given both ends
                    r.bridge_hit = true;
                    r.tau = 0.5 * (out.grid[k] + out.grid[k + 1]);
                    r.equity_at_default = std::exp(0.5 * (s[i] + s_next[i]) + bridge_sd[k] * normal(rng));
                }
            }
            std::swap(x, x_next);
            std::swap(s, s_next);
        }
        for (std::size_t i = 0; i < n; ++i) recs[i].equity_at_maturity = std::exp(s[i]);
    });
    return out;
}

SimulationOutput simulate_intensity_defaults(const HazardCurve& hazard, const ErsContract& ers,
                                             const DiscountCurve& curve, const SimulationConfig& cfg) {
    ers.validate();
    cfg.validate();
    SimulationOutput out;
    const double maturity = ers.maturity();
    out.grid = {0.0, maturity};
    out.paths.resize(cfg.n_paths);
    const std::size_t block = cfg.block_size + (cfg.block_size % 2);
    const std::size_t n_blocks = (cfg.n_paths + block - 1) / block;
    const double sig = ers.equity_vol;
    const double carry = ers.dividend_yield + 0.5 * sig * sig;

    auto equity_at = [&](double t, double z) {
        return ers.s0 * std::exp(-std::log(curve.discount(t)) - carry * t + sig * std::sqrt(t) * z);
    };

    run_blocks(n_blocks, cfg.threads, [&](std::size_t blk) {
        const std::size_t first = blk * block;
        const std::size_t n = std::min(block, cfg.n_paths - first);
        std::mt19937_64 rng = block_rng(cfg.seed, blk);
        std::normal_distribution<double> normal;
        std::exponential_distribution<double> expo;
        for (std::size_t i = 0; i < n; ++i) {
            PathRecord& r = out.paths[first + i];
            r = PathRecord{};
            const double tau = hazard.inverse_cumulative_hazard(expo(rng));
            const double z_tau = normal(rng);
            const double z_end = normal(rng);
            r.equity_at_maturity = equity_at(maturity, z_end);
            if (tau <= maturity) {
                r.defaulted = true;
                r.tau = tau;
                r.equity_at_default = equity_at(tau, z_tau);
            }
        }
    });
    return out;
}

double ers_npv_at_default(const PathRecord& path, const ErsContract& ers, const DiscountCurve& curve,
                          double spread) {
    if (!path.defaulted) throw DomainError("ers_npv_at_default: path did not default");
    if (path.tau > ers.maturity() || path.tau < 0.0)
        throw DomainError("ers_npv_at_default: default time outside [0, T_b]");
    const PaymentSchedule& sch = ers.schedule;
    const std::size_t beta = sch.beta(path.tau);
    double remaining = 0.0;
    for (std::size_t i = beta; i <= sch.size(); ++i) remaining += curve.discount(sch.date(i)) * sch.accrual(i);
    const double prev_date = sch.date(std::min(beta - 1, sch.size()));
    const double nominal = ers.nominal();
    return nominal * remaining * spread + nominal * curve.discount(prev_date) -
           ers.stock_count * curve.discount(path.tau) * path.equity_at_default;
}

CvaEstimate estimate_cva(const SimulationOutput& sim, const ErsContract& ers, const DiscountCurve& curve,
                         double closed_form_pd, bool control_variate, double spread) {
    const std::size_t n = sim.paths.size();
    if (n < 2) throw ConfigError("CVA estimate needs at least 2 paths");
    std::vector<double> payoff(n, 0.0);
    std::vector<double> indicator(n, 0.0);
    CvaEstimate e;
    e.n_paths = n;
    e.closed_form_default_probability = closed_form_pd;
    e.control_variate = control_variate;
    for (std::size_t i = 0; i < n; ++i) {
        const PathRecord& p = sim.paths[i];
        if (!p.defaulted) continue;
        ++e.defaulted;
        indicator[i] = 1.0;
        payoff[i] = ers.lgd() * std::max(ers_npv_at_default(p, ers, curve, spread), 0.0);
    }
    const double nn = static_cast<double>(n);
    const double my = mean_of(payoff);
    const double mc = mean_of(indicator);
    std::vector<double> dyy(n), dcc(n), dyc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = payoff[i] - my;
        const double dc = indicator[i] - mc;
        dyy[i] = dy * dy;
        dcc[i] = dc * dc;
        dyc[i] = dy * dc;
    }
    const double var_y = pairwise_sum(dyy) / (nn - 1.0);
    const double var_c = pairwise_sum(dcc) / (nn - 1.0);
    const double cov = pairwise_sum(dyc) / (nn - 1.0);

    e.plain_value = my;
    e.plain_std_error = std::sqrt(var_y / nn);
    e.default_fraction = mc;
    e.default_fraction_std_error = std::sqrt(var_c / nn);
    if (control_variate && var_c > 0.0) {
        e.cv_coefficient = cov / var_c;
        e.value = my - e.cv_coefficient * (mc - closed_form_pd);
        const double var_adj = std::max(0.0, var_y - cov * cov / var_c);
        e.std_error = std::sqrt(var_adj / nn);
    } else {
        e.value = my;
        e.std_error = e.plain_std_error;
    }
    return e;
}

double closed_form_default_probability(const CreditModel& model, double maturity) {
    return 1.0 - SurvivalCurve::of(model)(maturity);
}

SimulationOutput simulate(const CreditModel& model, const ErsContract& ers, const DiscountCurve& curve,
                          const SimulationConfig& cfg) {
    if (const auto* h = std::get_if<HazardCurve>(&model)) return simulate_intensity_defaults(*h, ers, curve, cfg);
    return simulate_joint_paths(model, ers, curve, cfg);
}

CvaEstimate ers_cva_term(const CreditModel& model, const ErsContract& ers, const DiscountCurve& curve,
                         const SimulationConfig& cfg, double spread) {
    const SimulationOutput sim = simulate(model, ers, curve, cfg);
    return estimate_cva(sim, ers, curve, closed_form_default_probability(model, ers.maturity()),
                        cfg.control_variate, spread);
}

ErsPricingResult price_fair_spread(const SimulationOutput& sim, ModelKind kind, const ErsContract& ers_template,
                                   const DiscountCurve& curve, const SimulationConfig& cfg, double closed_form_pd) {
    constexpr double kTolerance = 0.05e-4;  // 0.05 bp
    constexpr int kMaxIterations = 50;

    ErsPricingResult res;
    res.model = kind;
    res.correlation = ers_template.correlation;
    res.kernel = std::string(to_string(sim.isa));
    res.warnings = sim.log;
    const double denom = ers_template.nominal() * ers_template.annuity(curve);

    double x = 0.0;
    bool converged = false;
    std::vector<double> deltas;
    res.iteration_trace_bp.push_back(0.0);
    for (int it = 0; it < kMaxIterations; ++it) {
        const double next = estimate_cva(sim, ers_template, curve, closed_form_pd, cfg.control_variate, x).value / denom;
        deltas.push_back(std::abs(next - x));
        res.iteration_trace_bp.push_back(next * 1e4);
        x = next;
        if (deltas.back() < kTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "ERS fair-spread iteration did not converge in " << kMaxIterations << " steps; trace (bp):";
        for (double v : res.iteration_trace_bp) os << ' ' << v;
        throw CalibrationError(os.str(), os.str());
    }
    for (std::size_t k = 2; k < deltas.size(); ++k) {
        if (deltas[k] > deltas[k - 1]) {
            res.contraction_ok = false;
            res.warnings.push_back("fair-spread iteration is not contracting after the second step");
            break;
        }
    }

    res.cva = estimate_cva(sim, ers_template, curve, closed_form_pd, cfg.control_variate, x);
    res.fair_spread_bp = x * 1e4;
    res.fair_spread_std_error_bp = res.cva.std_error / denom * 1e4;
    res.plain_fair_spread_bp = res.cva.plain_value / denom * 1e4;
    res.plain_std_error_bp = res.cva.plain_std_error / denom * 1e4;
    if (res.cva.std_error > 0.0)
        res.variance_reduction_factor = std::pow(res.cva.plain_std_error / res.cva.std_error, 2);
    res.low_statistics = res.cva.defaulted < 100 ||
                         (res.fair_spread_bp > 0.0 && res.fair_spread_std_error_bp > res.fair_spread_bp);
    if (res.cva.defaulted == 0) res.warnings.push_back("low statistics: no defaulted paths, CVA set to 0");
    else if (res.low_statistics)
        res.warnings.push_back("low statistics: standard error is large relative to the fair spread");
    return res;
}

ErsPricingResult ers_fair_spread(const CreditModel& model, const ErsContract& ers_template,
                                 const DiscountCurve& curve, const SimulationConfig& cfg) {
    const SimulationOutput sim = simulate(model, ers_template, curve, cfg);
    return price_fair_spread(sim, kind_of(model), ers_template, curve, cfg,
                             closed_form_default_probability(model, ers_template.maturity()));
}

ErsPricingResult intensity_ers_check(const HazardCurve& hazard, const ErsContract& ers_template,
                                     const DiscountCurve& curve, const SimulationConfig& cfg) {
    return ers_fair_spread(CreditModel{hazard}, ers_template, curve, cfg);
}

void write_paths_csv(const SimulationOutput& sim, const std::string& path, std::size_t cap) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "path,scenario,defaulted,bridge_hit,tau,equity_at_default,equity_at_maturity\n";
    os << std::setprecision(17);
    const std::size_t n = std::min(cap, sim.paths.size());
    for (std::size_t i = 0; i < n; ++i) {
        const PathRecord& p = sim.paths[i];
        os << i << ',' << int(p.scenario) << ',' << int(p.defaulted) << ',' << int(p.bridge_hit) << ','
           << p.tau << ',' << p.equity_at_default << ',' << p.equity_at_maturity << '\n';
    }
}

}  // namespace fpcredit::mc
