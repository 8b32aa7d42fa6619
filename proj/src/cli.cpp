#include "wgkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wgkit/config.hpp"
#include "wgkit/report.hpp"

namespace wgkit {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double nm = 1e-9;

// Bad data rows are domain errors (exit 1) but carry their row number.
struct DataError : DomainError {
    using DomainError::DomainError;
};

struct Context {
    WorkbenchConfig cfg;
    std::string command;
    std::ostream& out;

    std::string path(const std::string& file) const { return (fs::path(cfg.output_dir) / file).string(); }

    void write_csv(const std::string& file, const CsvTable& t) const {
        write_atomic(path(file), t.render(command, cfg.hash));
    }

    void write_json(const std::string& file, json body) const {
        body["meta"] = {{"tool", "wgkit"},
                        {"version", tool_version()},
                        {"command", command},
                        {"config_hash", hex64(cfg.hash)}};
        write_atomic(path(file), body.dump(2) + "\n");
    }
};

std::string nm_text(double meters) { return format_number(std::round(meters / nm * 1e6) / 1e6); }

std::vector<double> sweep_samples(Range r, std::optional<double> from_nm, std::optional<double> to_nm,
                                  std::optional<double> step_nm) {
    if (from_nm) r.from = *from_nm / 1e9;
    if (to_nm) r.to = *to_nm / 1e9;
    if (step_nm) r.step = *step_nm / 1e9;
    return r.samples();
}

// --- solve ---------------------------------------------------------------

void write_component(const Context& c, const std::string& file, const Eigen::ArrayXXcd& f,
                     const std::function<double(int)>& x, const std::function<double(int)>& y) {
    CsvTable t;
    t.columns = {"x_nm", "y_nm", "re", "im"};
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j)
            t.add({nm_text(x(i)), nm_text(y(j)), format_number(f(i, j).real()),
                   format_number(f(i, j).imag())});
    c.write_csv(file, t);
}

int cmd_solve(Context& c) {
    const auto grid = c.cfg.setup.grid(c.cfg.geometry, c.cfg.wavelength);
    const auto modes = solve_modes(grid, c.cfg.mode_count, std::nullopt, c.cfg.setup.solver);
    const auto& g = *grid;
    json list = json::array();
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto& m = modes[k];
        list.push_back({{"index", k},
                        {"n_eff", m.n_eff},
                        {"polarization", to_string(m.polarization)},
                        {"te_fraction", m.te_fraction()},
                        {"power", mode_power(m)},
                        {"boundary_energy_fraction", m.boundary_energy_fraction},
                        {"window_adequate", m.window_adequate()}});
        const std::string p = "mode" + std::to_string(k) + "_";
        auto xc = [&](int i) { return g.x_center(i); };
        auto xn = [&](int i) { return g.x_node(i + 1); };
        auto yc = [&](int j) { return g.y_center(j); };
        auto yn = [&](int j) { return g.y_node(j + 1); };
        write_component(c, p + "ex.csv", m.ex, xc, yn);
        write_component(c, p + "ey.csv", m.ey, xn, yc);
        write_component(c, p + "ez.csv", m.ez, xn, yn);
        write_component(c, p + "hx.csv", m.hx, xn, yc);
        write_component(c, p + "hy.csv", m.hy, xc, yn);
        write_component(c, p + "hz.csv", m.hz, xc, yc);
    }
    c.write_json("modes.json", {{"lambda_nm", c.cfg.wavelength / nm},
                                {"grid",
                                 {{"nx", g.nx},
                                  {"ny", g.ny},
                                  {"dx_nm", g.dx / nm},
                                  {"dy_nm", g.dy / nm},
                                  {"h_units", "eta0*H"}}},
                                {"modes", list}});
    c.out << "solve: " << modes.size() << " guided mode(s) at " << nm_text(c.cfg.wavelength) << " nm";
    if (!modes.empty()) c.out << ", n_eff = " << format_number(modes[0].n_eff);
    for (const auto& m : modes)
        if (!m.window_adequate()) c.out << " [warning: field reaches the window edge]";
    c.out << "\n";
    return 0;
}

// --- dispersion ----------------------------------------------------------

int cmd_dispersion(Context& c, const std::vector<double>& lambdas) {
    const auto curve = dispersion_sweep(c.cfg.geometry, lambdas, c.cfg.mode_count, c.cfg.setup);
    CsvTable t;
    t.columns = {"lambda_nm"};
    for (int b = 0; b < c.cfg.mode_count; ++b) t.columns.push_back("neff_mode" + std::to_string(b));
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        std::vector<std::string> row{nm_text(lambdas[k])};
        for (const auto& branch : curve.neff) row.push_back(branch[k] ? format_number(*branch[k]) : "");
        t.add(row);
    }
    c.write_csv("dispersion.csv", t);
    c.out << "dispersion: " << lambdas.size() << " wavelengths, " << c.cfg.mode_count
          << " branches -> " << c.path("dispersion.csv") << "\n";
    return 0;
}

// --- cutoff-height -------------------------------------------------------

int cmd_cutoff(Context& c) {
    const auto r = cutoff_height(c.cfg.geometry, c.cfg.wavelength, c.cfg.cutoff_h_lo, c.cfg.cutoff_h_hi,
                                 c.cfg.setup);
    c.write_json("cutoff_height.json", {{"width_nm", c.cfg.geometry.core_width / nm},
                                        {"lambda_nm", c.cfg.wavelength / nm},
                                        {"height_nm", r.height / nm},
                                        {"below_range", r.below_range},
                                        {"solves", r.solves}});
    c.out << "cutoff-height: " << format_number(std::round(r.height / nm * 10) / 10) << " nm"
          << (r.below_range ? " (guided at the lower bracket end; cutoff lies below)" : "") << "\n";
    return 0;
}

// --- beta ----------------------------------------------------------------

int cmd_beta(Context& c, const std::vector<double>& lambdas) {
    DipoleEmitter e;
    e.x = c.cfg.emitter_x;
    e.y = c.cfg.standoff;
    const auto rows = beta_spectrum(c.cfg.geometry, e, lambdas, c.cfg.orientations, c.cfg.setup, c.cfg.rho);
    CsvTable t;
    t.columns = {"lambda_nm", "orientation", "gamma_ratio", "rho", "beta"};
    for (const auto& r : rows)
        t.add({nm_text(r.lambda), r.orientation, format_number(r.gamma_wg_ratio), format_number(r.rho),
               format_number(r.beta)});
    c.write_csv("beta.csv", t);
    double best = 0.0;
    for (const auto& r : rows) best = std::max(best, r.beta);
    c.out << "beta: " << rows.size() << " rows (rho = " << format_number(c.cfg.rho)
          << "), max beta = " << format_number(best) << "\n";
    return 0;
}

// --- na ------------------------------------------------------------------

int cmd_na(Context& c) {
    const auto grid = c.cfg.setup.grid(c.cfg.geometry, c.cfg.wavelength);
    const auto modes = solve_modes(grid, 1, std::nullopt, c.cfg.setup.solver);
    if (modes.empty()) throw DomainError("na: no guided mode at the configured wavelength");
    NaOptions opt;
    opt.normalization = c.cfg.na_normalization;
    CsvTable t;
    t.columns = {"na", "fraction"};
    std::vector<double> nas = c.cfg.na_values;
    std::sort(nas.begin(), nas.end());
    std::optional<double> at065;
    for (double na : nas) {
        const auto r = na_collection(modes[0], na, opt);
        t.add({format_number(na), format_number(r.fraction)});
        if (na == 0.65) at065 = r.fraction;
    }
    c.write_csv("na.csv", t);
    c.out << "na: " << nas.size() << " apertures ("
          << (opt.normalization == NaNormalization::total_power ? "total-power" : "propagating-disc")
          << " basis)";
    if (at065) c.out << ", fraction(0.65) = " << format_number(*at065);
    c.out << "\n";
    return 0;
}

// --- taper ---------------------------------------------------------------

int cmd_taper(Context& c, bool adiabatic) {
    if (c.cfg.tip_widths.empty()) throw DomainError("taper: no tip widths configured");
    FiberSpec fiber = c.cfg.fiber;
    fiber.lambda = c.cfg.wavelength;
    const auto geom = c.cfg.facet_geometry();
    const auto setup = c.cfg.facet_setup();
    const auto sweep = taper_coupling_sweep(geom, c.cfg.tip_widths, fiber, setup, c.cfg.vectorial_overlap);
    CsvTable t;
    t.columns = {"tip_width_nm", "eta"};
    for (const auto& p : sweep.points) t.add({nm_text(p.tip_width), p.eta ? format_number(*p.eta) : ""});
    c.write_csv("taper.csv", t);
    c.out << "taper: " << sweep.points.size() << " widths";
    if (sweep.best_eta)
        c.out << ", best eta = " << format_number(*sweep.best_eta) << " at "
              << nm_text(*sweep.best_width) << " nm";
    if (adiabatic && sweep.best_width) {
        TaperProfile tp;
        tp.tip_width = *sweep.best_width;
        tp.end_width = std::max(geom.core_width, tp.tip_width);
        tp.length = c.cfg.taper_length;
        tp.height = geom.core_height;
        const double margin =
            adiabaticity_margin(tp, fiber.lambda, solver_index_pairs(geom, fiber.lambda, setup));
        c.write_json("taper_adiabaticity.json",
                     {{"tip_width_nm", tp.tip_width / nm},
                      {"end_width_nm", tp.end_width / nm},
                      {"length_um", tp.length / 1e-6},
                      {"margin", std::isinf(margin) ? json("inf") : json(margin)}});
        c.out << ", adiabaticity margin = " << (std::isinf(margin) ? "inf" : format_number(margin));
    }
    c.out << "\n";
    return 0;
}

// --- payne-lacey ---------------------------------------------------------

int cmd_payne_lacey(Context& c) {
    const auto slab = effective_slab_reduction(c.cfg.geometry, c.cfg.wavelength);
    const double sigma = payne_lacey_sigma_for(slab, c.cfg.target_alpha_db_per_mm, c.cfg.correlation_length,
                                               c.cfg.wavelength, c.cfg.payne_lacey);
    json body{{"lambda_nm", c.cfg.wavelength / nm},
              {"slab", {{"n1", slab.n1}, {"n2", slab.n2}, {"half_width_nm", slab.half_width / nm},
                        {"lateral_neff", slab.lateral_neff}}},
              {"correlation_length_nm", c.cfg.correlation_length / nm},
              {"model", c.cfg.payne_lacey.mode == PayneLaceyMode::full ? "full" : "upper_bound"},
              {"target_db_per_mm", c.cfg.target_alpha_db_per_mm},
              {"sigma_for_target_nm", sigma / nm}};
    if (c.cfg.payne_lacey.mode == PayneLaceyMode::upper_bound) body["kappa"] = c.cfg.payne_lacey.kappa;
    c.out << "payne-lacey: sigma = " << format_number(std::round(sigma / nm * 100) / 100)
          << " nm RMS for " << format_number(c.cfg.target_alpha_db_per_mm) << " dB/mm";
    if (c.cfg.sigma) {
        const double a = payne_lacey_alpha(slab, {*c.cfg.sigma, c.cfg.correlation_length},
                                           c.cfg.wavelength, c.cfg.payne_lacey);
        body["sigma_nm"] = *c.cfg.sigma / nm;
        body["alpha_db_per_mm"] = a;
        c.out << "; alpha(" << format_number(*c.cfg.sigma / nm) << " nm) = " << format_number(a) << " dB/mm";
    }
    c.write_json("payne_lacey.json", body);
    c.out << "\n";
    return 0;
}

// --- cutback -------------------------------------------------------------

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& s, int row, const std::string& col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("data row " + std::to_string(row) + ": column '" + col + "' is not a number: '" +
                        s + "'");
    }
}

CutbackDataset read_cutback(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read data file '" + path + "'");
    std::string line;
    std::map<std::string, std::size_t> col;
    CutbackDataset d;
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv(line);
        if (col.empty()) {
            for (std::size_t i = 0; i < cells.size(); ++i) col[cells[i]] = i;
            for (const auto& [name, idx] : col)
                if (name != "length_mm" && name != "transmission" && name != "loss_db" && name != "excluded" &&
                    name != "reason" && name != "sigma_db")
                    throw DataError("data header: unknown column '" + name + "'");
            if (!col.count("length_mm")) throw DataError("data header: missing 'length_mm'");
            if (col.count("transmission") == col.count("loss_db"))
                throw DataError("data header: need exactly one of 'transmission' or 'loss_db'");
            continue;
        }
        ++row;
        if (cells.size() != col.size())
            throw DataError("data row " + std::to_string(row) + ": expected " + std::to_string(col.size()) +
                            " cells, got " + std::to_string(cells.size()));
        const double len = parse_cell(cells[col["length_mm"]], row, "length_mm");
        bool excluded = false;
        if (col.count("excluded")) {
            const std::string& x = cells[col["excluded"]];
            if (x != "0" && x != "1" && !x.empty())
                throw DataError("data row " + std::to_string(row) + ": 'excluded' must be 0 or 1");
            excluded = x == "1";
        }
        const std::string reason = col.count("reason") ? cells[col["reason"]] : "";
        try {
            if (col.count("transmission"))
                d.add_transmission(len, parse_cell(cells[col["transmission"]], row, "transmission"), excluded,
                                   reason);
            else
                d.add_loss_db(len, parse_cell(cells[col["loss_db"]], row, "loss_db"), excluded, reason);
        } catch (const DataError&) {
            throw;
        } catch (const DomainError& e) {
            throw DataError("data row " + std::to_string(row) + ": " + e.what());
        }
        if (col.count("sigma_db") && !cells[col["sigma_db"]].empty())
            d.entries.back().sigma_db = parse_cell(cells[col["sigma_db"]], row, "sigma_db");
    }
    if (col.empty()) throw DataError("data file has no header row");
    return d;
}

int cmd_cutback(Context& c, const std::string& data, std::optional<double> l_out_db) {
    const auto d = read_cutback(data);
    const auto fit = fit_cutback(d, c.cfg.weighted_fit);
    std::string source;
    double l_out;
    if (l_out_db) {
        l_out = *l_out_db;
        source = "flag";
    } else {
        l_out = to_total_loss_db(c.cfg.collection_fraction);
        source = "collection_fraction=" + format_number(c.cfg.collection_fraction);
    }
    const auto ins = insertion_loss(fit, l_out);
    json excluded = json::array();
    for (auto i : fit.excluded)
        excluded.push_back({{"index", i},
                            {"length_mm", d.entries[i].length_mm},
                            {"loss_db", d.entries[i].loss_db},
                            {"reason", d.entries[i].reason}});
    c.write_json("cutback.json",
                 {{"slope_db_per_mm", fit.slope},
                  {"slope_err", fit.slope_err},
                  {"intercept_db", fit.intercept},
                  {"intercept_err", fit.intercept_err},
                  {"covariance", fit.covariance},
                  {"n_points", fit.n_points},
                  {"degenerate_fit", fit.degenerate},
                  {"weighted", c.cfg.weighted_fit},
                  {"insertion_db", ins.value},
                  {"insertion_err", ins.error},
                  {"insertion_negative", ins.negative},
                  {"l_out_db", l_out},
                  {"l_out_source", source},
                  // 0.623 and 0.632 both appear for the same collection figure.
                  {"l_out_db_if_0.632", to_total_loss_db(0.632)},
                  {"excluded_points", excluded}});
    auto r2 = [](double v) { return format_number(std::round(v * 100) / 100); };
    c.out << "cutback: slope " << r2(fit.slope) << " +/- " << r2(fit.slope_err) << " dB/mm, insertion "
          << r2(ins.value) << " +/- " << r2(ins.error) << " dB"
          << (fit.degenerate ? " [warning: two points, exact fit, no error estimate]" : "")
          << (ins.negative ? " [warning: negative insertion loss]" : "") << "\n";
    return 0;
}

// --- budget --------------------------------------------------------------

int cmd_budget(Context& c) {
    const auto& f = c.cfg;
    const double eta = budget(f.budget_beta, f.budget_loss_db_per_mm, f.budget_length_mm, f.budget_taper_eff,
                              f.budget_detector_eff);
    c.write_json("budget.json", {{"beta", f.budget_beta},
                                 {"prop_loss_db_per_mm", f.budget_loss_db_per_mm},
                                 {"length_mm", f.budget_length_mm},
                                 {"taper_eff", f.budget_taper_eff},
                                 {"detector_eff", f.budget_detector_eff},
                                 {"efficiency", eta}});
    c.out << "budget: end-to-end efficiency " << format_number(std::round(eta * 1e4) / 1e4) << "\n";
    return 0;
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Strip-waveguide design and characterization workbench", "wgkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file (defaults built in)");
    app.set_version_flag("--version", std::string(tool_version()));

    std::optional<double> from_nm, to_nm, step_nm, l_out_db;
    std::string data;
    bool adiabatic = false;

    auto* solve = app.add_subcommand("solve", "guided modes at the configured wavelength");
    auto* disp = app.add_subcommand("dispersion", "effective-index dispersion of the lowest modes");
    auto* cutoff = app.add_subcommand("cutoff-height", "core height where the fundamental mode is cut off");
    auto* beta_cmd = app.add_subcommand("beta", "emitter coupling spectrum per dipole orientation");
    auto* na = app.add_subcommand("na", "collected fraction versus numerical aperture");
    auto* taper = app.add_subcommand("taper", "fiber coupling versus taper tip width");
    auto* pl = app.add_subcommand("payne-lacey", "sidewall scattering loss estimate and sigma inversion");
    auto* cut = app.add_subcommand("cutback", "fit cut-back measurements");
    auto* bud = app.add_subcommand("budget", "end-to-end emitter-to-detector efficiency");
    for (auto* s : {disp, beta_cmd}) {
        s->add_option("--from-nm", from_nm, "sweep start");
        s->add_option("--to-nm", to_nm, "sweep end");
        s->add_option("--step-nm", step_nm, "sweep step");
    }
    taper->add_flag("--adiabaticity", adiabatic, "also check the best taper's adiabaticity margin");
    cut->add_option("--data", data, "CSV: length_mm, transmission|loss_db[, excluded, reason, sigma_db]")
        ->required();
    cut->add_option("--l-out-db", l_out_db, "out-coupling loss to subtract (dB)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "wgkit: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        Context c{config_path.empty() ? default_config() : load_config(config_path), "", out};
        auto* sub = app.get_subcommands().front();
        c.command = sub->get_name();
        if (sub == solve) return cmd_solve(c);
        if (sub == disp) return cmd_dispersion(c, sweep_samples(c.cfg.dispersion, from_nm, to_nm, step_nm));
        if (sub == cutoff) return cmd_cutoff(c);
        if (sub == beta_cmd) return cmd_beta(c, sweep_samples(c.cfg.beta_range, from_nm, to_nm, step_nm));
        if (sub == na) return cmd_na(c);
        if (sub == taper) return cmd_taper(c, adiabatic);
        if (sub == pl) return cmd_payne_lacey(c);
        if (sub == cut) return cmd_cutback(c, data, l_out_db);
        if (sub == bud) return cmd_budget(c);
        err << "wgkit: unhandled subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "wgkit: config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "wgkit: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "wgkit: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wgkit
