#include "fpcredit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fpcredit/errors.hpp"
#include "fpcredit/presets.hpp"

namespace fpcredit::cli {

namespace {

using io::Json;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<ModelKind> parse_models(const std::string& s) {
    std::vector<ModelKind> out;
    for (const auto& name : split_list(s)) {
        if (name == "all") return {ModelKind::Intensity, ModelKind::At1p, ModelKind::Sbtv};
        const ModelKind k = model_kind_from_string(name);
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    if (out.empty()) throw ConfigError("no model selected");
    return out;
}

// Flags shared by every subcommand.
struct CommonFlags {
    std::string config_path;
    std::optional<double> rate;
    std::optional<double> barrier;
    std::optional<double> b;
    std::optional<double> recovery;
    std::optional<std::string> convention;
    std::optional<std::string> preset;
    std::optional<std::string> quotes;
    std::string quote_date;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON run configuration");
        app->add_option("--rate", rate, "flat continuously-compounded discount rate");
        app->add_option("--barrier", barrier, "barrier ratio H (AT1P) / H^1 (SBTV)");
        app->add_option("--b", b, "barrier volatility exponent B");
        app->add_option("--recovery", recovery, "recovery rate");
        app->add_option("--convention", convention, "CDS convention: postponed or exact");
        app->add_option("--preset", preset, "named input preset");
        app->add_option("--quotes", quotes, "quote CSV (tenor_years,spread_bp[,bid_bp,ask_bp])");
        app->add_option("--quote-date", quote_date, "quote date for CSV input (ISO)");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg = apply_config(io::read_json_file(config_path), cfg);
        if (rate) cfg.curve = DiscountCurve::flat(*rate);
        if (barrier) cfg.calibration.barrier_ratio = *barrier;
        if (b) cfg.calibration.b = *b;
        if (recovery) cfg.recovery = *recovery;
        if (convention) cfg.calibration.convention = convention_from_string(*convention);
        if (preset) cfg.preset = preset;
        if (quotes) cfg.quotes_path = quotes;
        if (!quote_date.empty()) cfg.quote_date = quote_date;
        if (cfg.preset && cfg.quotes_path) throw ConfigError("use either --preset or --quotes, not both");
        return cfg;
    }
};

CdsQuoteStrip load_strip(const RunConfig& cfg, Json& preset_echo) {
    if (cfg.preset) {
        const Preset& p = find_preset(*cfg.preset);
        const Json expanded = expand(p);
        preset_echo = Json{{"name", p.name}, {"version", p.version}, {"checksum", checksum(expanded)},
                           {"expansion", expanded}};
        CdsQuoteStrip s = p.strip;
        s.recovery = cfg.recovery;
        return s;
    }
    if (cfg.quotes_path) return io::read_quotes_csv(*cfg.quotes_path, cfg.recovery, cfg.quote_date);
    throw ConfigError("no quotes: pass --preset or --quotes");
}

std::string default_output(const RunConfig& cfg, const std::string& prefix) {
    std::string tag = "run";
    if (cfg.preset) tag = *cfg.preset;
    else if (cfg.quotes_path) tag = std::filesystem::path(*cfg.quotes_path).stem().string();
    return (std::filesystem::path(output_dir()) / (prefix + "-" + tag + ".json")).string();
}

void print_calibration(std::ostream& out, const CdsQuoteStrip& strip, const std::vector<CalibrationReport>& reports) {
    out << "Quote date " << (strip.quote_date.empty() ? "-" : strip.quote_date) << ", recovery "
        << strip.recovery * 100 << "%\n";
    for (const auto& r : reports) {
        out << "\n[" << to_string(r.kind) << "]" << (r.exact() ? " exact fit" : " NOT exact") << "\n";
        if (r.first_step)
            out << std::fixed << std::setprecision(4) << "  H2 = " << r.first_step->upper_barrier
                << ", p1 = " << r.first_step->lower_probability << ", sigma_bar = " << r.first_step->sigma_bar
                << ", step-1 rms = " << std::setprecision(6) << r.first_step->rms_bp << " bp\n";
        out << "  tenor   quote_bp   param      survival   error_bp\n";
        for (std::size_t i = 0; i < r.pillars.size(); ++i) {
            const auto& p = r.pillars[i];
            out << std::fixed << std::setprecision(2) << "  " << std::setw(5) << p.tenor << std::setw(11)
                << p.quote * 1e4 << std::setw(10) << std::setprecision(3) << r.buckets[i].value * 100 << "%"
                << std::setw(11) << p.survival * 100 << "%" << std::setw(11) << std::setprecision(2)
                << std::scientific << p.error_bp << std::defaultfloat << "\n";
        }
        for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
    }
}

int cmd_calibrate(const CommonFlags& flags, const std::string& model_list, const std::string& out_path,
                  std::ostream& out, std::ostream& err) {
    RunConfig cfg = flags.resolve();
    Json preset_echo;
    const CdsQuoteStrip strip = load_strip(cfg, preset_echo);
    const auto kinds = parse_models(model_list);

    CalibrationSettings settings = cfg.calibration;
    std::vector<CalibrationReport> reports;
    for (ModelKind k : kinds) {
        if (k == ModelKind::Sbtv && strip.quotes.size() < 3) {
            err << "precondition error: SBTV requires >= 3 quotes\n";
            return kExitFailure;
        }
        reports.push_back(calibrate(k, strip, cfg.curve, settings));
    }

    Json doc;
    doc["schema"] = io::kCalibrationSchema;
    doc["sign_convention"] = io::kSignConvention;
    Json config = to_json(cfg);
    if (!preset_echo.is_null()) config["preset"] = preset_echo;
    doc["config"] = config;
    doc["strip"] = io::to_json(strip);

    bool warnings = false;
    Json sections = Json::array();
    for (const auto& r : reports) {
        Json s = io::to_json(r);
        // size of the postponed-payoff approximation at each pillar
        const SurvivalCurve surv = SurvivalCurve::of(r.model);
        Json gap = Json::array();
        for (const auto& q : strip.quotes) {
            const CdsContract c = make_cds(q.tenor, q.spread(), strip.recovery, settings.frequency);
            gap.push_back((fair_spread(c, cfg.curve, surv, CdsConvention::Exact, settings.steps_per_year) -
                           fair_spread(c, cfg.curve, surv, CdsConvention::Postponed)) * 1e4);
        }
        s["convention_gap_bp"] = gap;
        sections.push_back(s);
        warnings = warnings || !r.warnings.empty() || !r.exact() || r.degenerate;
    }
    doc["models"] = sections;

    if (reports.size() > 1) {
        Json cmp{{"pillars", strip.tenors()}};
        for (const auto& r : reports) cmp[std::string(to_string(r.kind))] = implied_survivals(r.model, strip.tenors());
        doc["implied_survival_comparison"] = cmp;
    }

    const std::string path = out_path.empty() ? default_output(cfg, "calibration") : out_path;
    io::write_json_file(path, doc);
    print_calibration(out, strip, reports);
    if (reports.size() > 1) {
        out << "\nImplied survival comparison\n  tenor";
        for (const auto& r : reports) out << std::setw(12) << to_string(r.kind);
        out << "\n";
        for (std::size_t i = 0; i < strip.quotes.size(); ++i) {
            out << "  " << std::setw(5) << std::fixed << std::setprecision(2) << strip.quotes[i].tenor;
            for (const auto& r : reports) out << std::setw(11) << std::setprecision(2) << r.pillars[i].survival * 100 << "%";
            out << "\n";
        }
    }
    out << "\nreport written to " << path << "\n";
    return warnings ? kExitWarnings : kExitOk;
}

struct LoadedModel {
    ModelKind kind;
    CreditModel model;
};

std::vector<LoadedModel> load_models(const Json& report) {
    if (report.value("schema", "") != io::kCalibrationSchema)
        throw ConfigError("parameter file is not a calibration report");
    std::vector<LoadedModel> out;
    for (const auto& s : report.at("models")) {
        const ModelKind k = model_kind_from_string(s.at("model").get<std::string>());
        out.push_back({k, io::model_from_json(k, s.at("parameters"))});
    }
    return out;
}

int cmd_price_cds(const CommonFlags& flags, const std::string& params_path, const std::string& model_name,
                  double spread_bp, double tenor, int frequency, const std::string& out_path, std::ostream& out) {
    if (!std::filesystem::exists(params_path)) throw std::runtime_error("I/O error: parameter file not found: " + params_path);
    const Json report = io::read_json_file(params_path);
    RunConfig cfg = flags.config_path.empty() && report.contains("config")
                        ? apply_config(report["config"], RunConfig{})
                        : RunConfig{};
    const RunConfig overrides = flags.resolve();
    if (!flags.config_path.empty()) cfg = overrides;
    if (flags.rate) cfg.curve = overrides.curve;
    if (flags.recovery) cfg.recovery = *flags.recovery;

    const auto models = load_models(report);
    const LoadedModel* chosen = &models.front();
    if (!model_name.empty()) {
        const ModelKind k = model_kind_from_string(model_name);
        auto it = std::find_if(models.begin(), models.end(), [k](const LoadedModel& m) { return m.kind == k; });
        if (it == models.end()) throw ConfigError("model '" + model_name + "' not in parameter file");
        chosen = &*it;
    }
    const SurvivalCurve surv = SurvivalCurve::of(chosen->model);
    const CdsContract c = make_cds(tenor, spread_bp * 1e-4, cfg.recovery, frequency);
    const int spy = cfg.calibration.steps_per_year;
    const double exact = cds_price_exact(c, cfg.curve, surv, spy);
    const double postponed = cds_price_postponed(c, cfg.curve, surv);
    const double fair_exact = fair_spread(c, cfg.curve, surv, CdsConvention::Exact, spy);
    const double fair_post = fair_spread(c, cfg.curve, surv, CdsConvention::Postponed, spy);

    out << std::setprecision(10) << "model " << to_string(chosen->kind) << ", tenor " << tenor << "y, spread "
        << spread_bp << " bp, recovery " << cfg.recovery << "\n"
        << "  price (exact)           " << exact << "\n"
        << "  price (postponed)       " << postponed << "\n"
        << "  fair spread exact bp    " << fair_exact * 1e4 << "\n"
        << "  fair spread postponed bp " << fair_post * 1e4 << "\n"
        << "  survival at maturity    " << surv(tenor) << "\n";
    if (!out_path.empty()) {
        io::write_json_file(out_path, Json{{"schema", "fpcredit.cds-price.v1"},
                                           {"sign_convention", io::kSignConvention},
                                           {"model", std::string(to_string(chosen->kind))},
                                           {"tenor_years", tenor},
                                           {"spread_bp", spread_bp},
                                           {"recovery", cfg.recovery},
                                           {"curve", io::to_json(cfg.curve)},
                                           {"price_exact", exact},
                                           {"price_postponed", postponed},
                                           {"fair_spread_exact_bp", fair_exact * 1e4},
                                           {"fair_spread_postponed_bp", fair_post * 1e4},
                                           {"survival", surv(tenor)}});
    }
    return kExitOk;
}

struct ErsFlags {
    std::string rho;
    std::string models = "at1p,sbtv,intensity";
    std::string params;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps_per_year;
    std::optional<unsigned> threads;
    std::optional<std::string> kernel;
    bool no_bridge = false;
    bool no_cv = false;
    bool antithetic = false;
    std::string dump_paths;
    std::string out;
};

int cmd_price_ers(const CommonFlags& flags, const ErsFlags& ef, std::ostream& out, std::ostream& err) {
    RunConfig cfg = flags.resolve();
    if (ef.paths) cfg.simulation.n_paths = *ef.paths;
    if (ef.seed) cfg.simulation.seed = *ef.seed;
    if (ef.steps_per_year) cfg.simulation.steps_per_year = *ef.steps_per_year;
    if (ef.threads) cfg.simulation.threads = *ef.threads;
    if (ef.no_bridge) cfg.simulation.bridge_correction = false;
    if (ef.no_cv) cfg.simulation.control_variate = false;
    if (ef.antithetic) cfg.simulation.antithetic = true;
    if (ef.kernel) cfg.simulation = io::simulation_config_from_json(Json{{"kernel", *ef.kernel}}, cfg.simulation);
    cfg.simulation.validate();

    std::vector<double> rhos{0.0};
    Json preset_echo;
    std::vector<LoadedModel> models;
    const auto kinds = parse_models(ef.models);
    std::optional<CdsQuoteStrip> strip;

    if (cfg.preset) {
        const Preset& p = find_preset(*cfg.preset);
        if (!p.ers) throw ConfigError("preset '" + p.name + "' has no equity return swap");
        cfg.ers = *p.ers;
        if (!p.correlations.empty()) rhos = p.correlations;
    }
    if (!ef.rho.empty()) rhos = parse_doubles(ef.rho);
    for (double r : rhos)
        if (!(std::abs(r) <= 1.0)) throw DomainError("correlation must lie in [-1, 1]");

    if (!ef.params.empty()) {
        if (!std::filesystem::exists(ef.params)) throw std::runtime_error("I/O error: parameter file not found: " + ef.params);
        for (auto& m : load_models(io::read_json_file(ef.params)))
            if (std::find(kinds.begin(), kinds.end(), m.kind) != kinds.end()) models.push_back(m);
    } else {
        strip = load_strip(cfg, preset_echo);
        for (ModelKind k : kinds) {
            const auto r = calibrate(k, *strip, cfg.curve, cfg.calibration);
            if (!r.exact()) err << "warning: " << to_string(k) << " calibration is not exact\n";
            models.push_back({k, r.model});
        }
    }
    if (models.empty()) throw ConfigError("no models to price");

    Json doc;
    doc["schema"] = io::kErsSchema;
    Json config = to_json(cfg);
    if (!preset_echo.is_null()) config["preset"] = preset_echo;
    config["correlations"] = rhos;
    doc["config"] = config;
    Json calib = Json::object();
    for (const auto& m : models) calib[std::string(to_string(m.kind))] = io::to_json(m.model);
    doc["calibration"] = calib;

    bool warn = false;
    Json results = Json::array();
    std::map<std::pair<int, double>, double> table;
    std::optional<mc::ErsPricingResult> anchor;
    bool dumped = false;
    for (const auto& m : models) {
        const bool independent = m.kind == ModelKind::Intensity;
        for (double rho : independent ? std::vector<double>{0.0} : rhos) {
            mc::ErsContract ers = cfg.ers;
            ers.correlation = rho;
            const mc::SimulationOutput sim = mc::simulate(m.model, ers, cfg.curve, cfg.simulation);
            if (!ef.dump_paths.empty() && !dumped) {
                mc::write_paths_csv(sim, ef.dump_paths);
                dumped = true;
            }
            const auto res = mc::price_fair_spread(sim, m.kind, ers, cfg.curve, cfg.simulation,
                                                   mc::closed_form_default_probability(m.model, ers.maturity()));
            warn = warn || res.low_statistics || !res.contraction_ok;
            if (independent) anchor = res;
            else table[{static_cast<int>(m.kind), rho}] = res.fair_spread_bp;
            results.push_back(io::to_json(res));
        }
    }
    doc["results"] = results;

    Json rows = Json::array();
    out << "Fair spread X (bp)\n     rho";
    for (const auto& m : models)
        if (m.kind != ModelKind::Intensity) out << std::setw(12) << to_string(m.kind);
    out << "\n";
    for (double rho : rhos) {
        Json row{{"rho", rho}};
        out << std::setw(8) << std::fixed << std::setprecision(2) << rho;
        for (const auto& m : models) {
            if (m.kind == ModelKind::Intensity) continue;
            const double x = table[{static_cast<int>(m.kind), rho}];
            row[std::string(to_string(m.kind))] = x;
            out << std::setw(12) << std::setprecision(2) << x;
        }
        out << "\n";
        rows.push_back(row);
    }
    doc["table"] = rows;
    if (anchor) {
        doc["intensity_anchor_bp"] = anchor->fair_spread_bp;
        out << "intensity (independence) X = " << std::setprecision(2) << anchor->fair_spread_bp << " bp (se "
            << anchor->fair_spread_std_error_bp << ")\n";
    }
    for (const auto& r : results)
        for (const auto& w : r["warnings"]) out << "warning (" << r["model"].get<std::string>() << ", rho "
                                                << r["rho"].get<double>() << "): " << w.get<std::string>() << "\n";

    const std::string path = ef.out.empty() ? default_output(cfg, "ers") : ef.out;
    io::write_json_file(path, doc);
    out << "report written to " << path << "\n";
    return warn ? kExitWarnings : kExitOk;
}

}  // namespace

io::Json to_json(const RunConfig& cfg) {
    Json j{{"curve", io::to_json(cfg.curve)},
           {"recovery", cfg.recovery},
           {"calibration", io::to_json(cfg.calibration)},
           {"simulation", io::to_json(cfg.simulation)},
           {"ers", io::to_json(cfg.ers)}};
    if (cfg.quotes_path) j["quotes_path"] = *cfg.quotes_path;
    if (!cfg.quote_date.empty()) j["quote_date"] = cfg.quote_date;
    return j;
}

RunConfig apply_config(const io::Json& j, RunConfig base) {
    if (j.contains("curve")) base.curve = io::curve_from_json(j["curve"]);
    base.recovery = j.value("recovery", base.recovery);
    if (j.contains("calibration")) base.calibration = io::settings_from_json(j["calibration"], base.calibration);
    // flat keys are accepted as shorthands
    base.calibration = io::settings_from_json(j, base.calibration);
    if (j.contains("simulation")) base.simulation = io::simulation_config_from_json(j["simulation"], base.simulation);
    if (j.contains("ers")) base.ers = io::ers_from_json(j["ers"], base.ers);
    if (j.contains("quote_date")) base.quote_date = j["quote_date"].get<std::string>();
    if (!(base.recovery >= 0.0 && base.recovery < 1.0)) throw ConfigError("recovery must lie in [0, 1)");
    return base;
}

std::string output_dir() {
    if (const char* d = std::getenv("FPCREDIT_OUTPUT_DIR"); d && *d) return d;
    return ".";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"First-passage structural credit models: CDS calibration and ERS counterparty risk"};
    app.require_subcommand(1);

    CommonFlags cal_flags;
    std::string cal_models = "at1p";
    std::string cal_out;
    auto* cal = app.add_subcommand("calibrate", "calibrate intensity / AT1P / SBTV models to a CDS strip");
    cal_flags.attach(cal);
    cal->add_option("--model", cal_models, "intensity, at1p, sbtv, a comma list, or all");
    cal->add_option("--out", cal_out, "report path");

    CommonFlags cds_flags;
    std::string params_path;
    std::string cds_model;
    double spread_bp = 0.0;
    double tenor = 5.0;
    int frequency = 4;
    std::string cds_out;
    auto* cds = app.add_subcommand("price-cds", "price a running CDS off a calibration report");
    cds_flags.attach(cds);
    cds->add_option("--params", params_path, "calibration report JSON")->required();
    cds->add_option("--model", cds_model, "model section to use (default: first)");
    cds->add_option("--spread", spread_bp, "running spread in bp");
    cds->add_option("--tenor", tenor, "maturity in years");
    cds->add_option("--frequency", frequency, "premium payments per year");
    cds->add_option("--out", cds_out, "optional JSON output");

    CommonFlags ers_common;
    ErsFlags ers_flags;
    auto* ers = app.add_subcommand("price-ers", "fair spread of an equity return swap under counterparty risk");
    ers_common.attach(ers);
    ers->add_option("--rho", ers_flags.rho, "comma-separated correlations");
    ers->add_option("--models", ers_flags.models, "comma-separated models: at1p, sbtv, intensity");
    ers->add_option("--params", ers_flags.params, "use models from a calibration report instead of calibrating");
    ers->add_option("--paths", ers_flags.paths, "Monte Carlo paths");
    ers->add_option("--seed", ers_flags.seed, "master RNG seed");
    ers->add_option("--steps-per-year", ers_flags.steps_per_year, "time steps per year");
    ers->add_option("--threads", ers_flags.threads, "worker threads (0 = all cores)");
    ers->add_option("--kernel", ers_flags.kernel, "path kernel: auto, scalar, avx2");
    ers->add_flag("--no-bridge", ers_flags.no_bridge, "disable the Brownian-bridge crossing correction");
    ers->add_flag("--no-control-variate", ers_flags.no_cv, "disable the default-indicator control variate");
    ers->add_flag("--antithetic", ers_flags.antithetic, "antithetic normals");
    ers->add_option("--dump-paths", ers_flags.dump_paths, "CSV dump of the first run's paths (capped)");
    ers->add_option("--out", ers_flags.out, "report path");

    std::vector<std::string> argv_store{"fpcredit"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitFailure;
    }

    try {
        if (cal->parsed()) return cmd_calibrate(cal_flags, cal_models, cal_out, out, err);
        if (cds->parsed()) return cmd_price_cds(cds_flags, params_path, cds_model, spread_bp, tenor, frequency, cds_out, out);
        if (ers->parsed()) return cmd_price_ers(ers_common, ers_flags, out, err);
    } catch (const CalibrationError& e) {
        err << "calibration failure: " << e.what() << "\n  " << e.diagnostics() << "\n";
        return kExitFailure;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const DomainError& e) {
        err << "precondition error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace fpcredit::cli
