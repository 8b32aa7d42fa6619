#include "wgkit/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wgkit {

using nlohmann::json;

std::vector<double> Range::samples() const {
    if (!(step > 0.0)) throw DomainError("range: step must be positive");
    if (!(to >= from)) throw DomainError("range: 'to' must not be below 'from'");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((to - from) / step + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(from + k * step);
    if (to - out.back() > 1e-9 * step) out.push_back(to);
    return out;
}

const MaterialModel& WorkbenchConfig::material(const std::string& name) const {
    for (const auto& m : materials)
        if (m.name == name) return m;
    throw ConfigError("unknown material '" + name + "'");
}

WaveguideGeometry WorkbenchConfig::facet_geometry() const {
    WaveguideGeometry g = geometry;
    g.superstrate = material(facet_superstrate);
    return g;
}

ModeSetup WorkbenchConfig::facet_setup() const {
    ModeSetup s = setup;
    s.window = facet_window;
    s.resolution = facet_resolution;
    return s;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// Walks one JSON object, remembering which keys were read so that anything
// left over can be reported as a typo.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(where(key) + ": not finite");
        return d;
    }

    double positive(const std::string& key, double fallback) {
        const double d = number(key, fallback);
        if (!(d > 0.0)) throw ConfigError(where(key) + ": must be positive");
        return d;
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback,
                                std::size_t exact = 0) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        if (exact && out.size() != exact)
            throw ConfigError(where(key) + ": expected " + std::to_string(exact) + " values");
        return out;
    }

    Section child(const std::string& key) { return Section(raw(key), where(key)); }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Divide to convert into metres: 700 / 1e9 rounds to exactly 700e-9, 700 * 1e-9 does not.
constexpr double per_nm = 1e9;
constexpr double per_um = 1e6;

MaterialModel parse_material(Section s) {
    const std::string name = s.string("name", "");
    if (name.empty()) throw ConfigError(s.where("name") + ": required");
    const std::string kind = s.string("kind", "");
    const auto range = s.numbers("range_um", {}, 2);
    if (range.empty()) throw ConfigError(s.where("range_um") + ": required");
    if (!(range[0] > 0.0 && range[1] > range[0]))
        throw ConfigError(s.where("range_um") + ": expected [min, max] with 0 < min < max");
    MaterialModel m;
    if (kind == "constant") {
        if (!s.has("n")) throw ConfigError(s.where("n") + ": required for a constant material");
        const double n = s.number("n", 1.0);
        if (!(n >= 1.0)) throw ConfigError(s.where("n") + ": must be >= 1");
        m = MaterialModel::constant(name, n, range[0] / per_um, range[1] / per_um);
    } else if (kind == "sellmeier") {
        const auto b = s.numbers("B", {}, 3);
        const auto c = s.numbers("C_um2", {}, 3);
        if (b.empty() || c.empty())
            throw ConfigError(s.where("B") + ": B and C_um2 are required for a Sellmeier material");
        m = MaterialModel::sellmeier(name, {b[0], b[1], b[2]}, {c[0], c[1], c[2]}, range[0] / per_um,
                                     range[1] / per_um);
    } else {
        throw ConfigError(s.where("kind") + ": expected 'constant' or 'sellmeier'");
    }
    s.finish();
    return m;
}

Range parse_range(Section s, const Range& d) {
    Range r;
    r.from = s.positive("from", d.from * per_nm) / per_nm;
    r.to = s.positive("to", d.to * per_nm) / per_nm;
    r.step = s.positive("step", d.step * per_nm) / per_nm;
    if (r.to < r.from) throw ConfigError(s.where("to") + ": must not be below 'from'");
    s.finish();
    return r;
}

void apply_document(WorkbenchConfig& c, const json& doc) {
    Section root(doc, "");

    if (root.has("materials")) {
        const json& arr = root.raw("materials");
        if (!arr.is_array()) throw ConfigError("materials: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            MaterialModel m = parse_material(Section(arr[i], "materials[" + std::to_string(i) + "]"));
            bool replaced = false;
            for (auto& existing : c.materials)
                if (existing.name == m.name) {
                    existing = m;
                    replaced = true;
                }
            if (!replaced) c.materials.push_back(m);
        }
    }

    // Material names are resolved after the list is complete.
    std::string core = "Ta2O5", sub = "SiO2", sup = "air";
    if (root.has("geometry")) {
        Section g = root.child("geometry");
        c.geometry.core_width = g.positive("width_nm", c.geometry.core_width * per_nm) / per_nm;
        c.geometry.core_height = g.positive("height_nm", c.geometry.core_height * per_nm) / per_nm;
        core = g.string("core", core);
        sub = g.string("substrate", sub);
        sup = g.string("superstrate", sup);
        const double deg = g.number("sidewall_deg", 0.0);
        if (!(deg >= 0.0 && deg < 45.0)) throw ConfigError("geometry.sidewall_deg: expected [0, 45)");
        c.geometry.sidewall_angle = deg * std::numbers::pi / 180.0;
        g.finish();
    }
    c.geometry.core = c.material(core);
    c.geometry.substrate = c.material(sub);
    c.geometry.superstrate = c.material(sup);

    if (root.has("grid")) {
        Section g = root.child("grid");
        const auto w = g.numbers("window_um", {c.setup.window.x_extent * per_um, c.setup.window.y_extent * per_um}, 2);
        const auto r = g.numbers("resolution_nm",
                                 {c.setup.resolution.dx * per_nm, c.setup.resolution.dy * per_nm}, 2);
        if (!(w[0] > 0 && w[1] > 0)) throw ConfigError("grid.window_um: must be positive");
        if (!(r[0] > 0 && r[1] > 0)) throw ConfigError("grid.resolution_nm: must be positive");
        c.setup.window = {w[0] / per_um, w[1] / per_um};
        c.setup.resolution = {r[0] / per_nm, r[1] / per_nm};
        c.setup.cross_section.min_margin =
            g.number("min_margin_um", c.setup.cross_section.min_margin * per_um) / per_um;
        c.setup.cross_section.subsamples = g.integer("subsamples", c.setup.cross_section.subsamples);
        g.finish();
    }

    if (root.has("solver")) {
        Section s = root.child("solver");
        c.mode_count = s.integer("mode_count", c.mode_count);
        if (c.mode_count < 1) throw ConfigError("solver.mode_count: must be >= 1");
        c.setup.solver.max_restarts = s.integer("max_restarts", c.setup.solver.max_restarts);
        c.setup.solver.krylov_dim = s.integer("krylov_dim", c.setup.solver.krylov_dim);
        c.setup.solver.tolerance = s.positive("tolerance", c.setup.solver.tolerance);
        c.setup.threads = s.integer("threads", c.setup.threads);
        s.finish();
    }

    if (root.has("emitter")) {
        Section e = root.child("emitter");
        c.emitter_x = e.number("x_nm", c.emitter_x * per_nm) / per_nm;
        c.standoff = e.number("standoff_nm", c.standoff * per_nm) / per_nm;
        if (!(c.standoff >= 0.0)) throw ConfigError("emitter.standoff_nm: must be >= 0");
        c.rho = e.number("rho", c.rho);
        if (!(c.rho >= 0.5 && c.rho <= 2.0)) throw ConfigError("emitter.rho: expected [0.5, 2.0]");
        if (e.has("orientations")) {
            const json& arr = e.raw("orientations");
            if (!arr.is_array() || arr.empty())
                throw ConfigError("emitter.orientations: expected a non-empty array");
            c.orientations.clear();
            for (const auto& o : arr) {
                if (!o.is_string()) throw ConfigError("emitter.orientations: expected strings");
                try {
                    c.orientations.push_back(orientation_from_string(o.get<std::string>()));
                } catch (const DomainError& ex) {
                    throw ConfigError(std::string("emitter.orientations: ") + ex.what());
                }
            }
        }
        e.finish();
    }

    if (root.has("fiber")) {
        Section f = root.child("fiber");
        c.fiber.mode_field_diameter = f.positive("mfd_um", c.fiber.mode_field_diameter * per_um) / per_um;
        c.vectorial_overlap = f.boolean("vectorial_overlap", c.vectorial_overlap);
        c.facet_superstrate = f.string("facet_superstrate", c.facet_superstrate);
        const auto w = f.numbers("facet_window_um", {c.facet_window.x_extent * per_um, c.facet_window.y_extent * per_um}, 2);
        const auto r = f.numbers("facet_resolution_nm",
                                 {c.facet_resolution.dx * per_nm, c.facet_resolution.dy * per_nm}, 2);
        c.facet_window = {w[0] / per_um, w[1] / per_um};
        c.facet_resolution = {r[0] / per_nm, r[1] / per_nm};
        c.taper_length = f.positive("taper_length_um", c.taper_length * per_um) / per_um;
        f.finish();
    }
    c.material(c.facet_superstrate);  // must exist

    if (root.has("sweeps")) {
        Section s = root.child("sweeps");
        c.wavelength = s.positive("wavelength_nm", c.wavelength * per_nm) / per_nm;
        if (s.has("dispersion_nm")) c.dispersion = parse_range(s.child("dispersion_nm"), c.dispersion);
        if (s.has("beta_nm")) c.beta_range = parse_range(s.child("beta_nm"), c.beta_range);
        if (s.has("tip_widths_nm")) {
            c.tip_widths.clear();
            for (double w : s.numbers("tip_widths_nm", {})) c.tip_widths.push_back(w / per_nm);
        }
        c.na_values = s.numbers("na_values", c.na_values);
        const auto h = s.numbers("cutoff_height_nm", {c.cutoff_h_lo * per_nm, c.cutoff_h_hi * per_nm}, 2);
        c.cutoff_h_lo = h[0] / per_nm;
        c.cutoff_h_hi = h[1] / per_nm;
        const std::string norm = s.string("na_normalization", "total_power");
        if (norm == "total_power")
            c.na_normalization = NaNormalization::total_power;
        else if (norm == "propagating_disc")
            c.na_normalization = NaNormalization::propagating_disc;
        else
            throw ConfigError("sweeps.na_normalization: expected 'total_power' or 'propagating_disc'");
        s.finish();
    }

    if (root.has("loss")) {
        Section l = root.child("loss");
        if (l.has("sigma_nm")) c.sigma = l.number("sigma_nm", 0.0) / per_nm;
        c.correlation_length = l.positive("correlation_length_nm", c.correlation_length * per_nm) / per_nm;
        c.target_alpha_db_per_mm = l.number("target_db_per_mm", c.target_alpha_db_per_mm);
        c.payne_lacey.kappa = l.positive("kappa", c.payne_lacey.kappa);
        const std::string mode = l.string("payne_lacey_mode", "full");
        if (mode == "full")
            c.payne_lacey.mode = PayneLaceyMode::full;
        else if (mode == "upper_bound")
            c.payne_lacey.mode = PayneLaceyMode::upper_bound;
        else
            throw ConfigError("loss.payne_lacey_mode: expected 'full' or 'upper_bound'");
        c.collection_fraction = l.number("collection_fraction", c.collection_fraction);
        if (!(c.collection_fraction > 0.0 && c.collection_fraction <= 1.0))
            throw ConfigError("loss.collection_fraction: expected (0, 1]");
        c.weighted_fit = l.boolean("weighted_fit", c.weighted_fit);
        l.finish();
    }

    if (root.has("budget")) {
        Section b = root.child("budget");
        c.budget_beta = b.number("beta", c.budget_beta);
        c.budget_loss_db_per_mm = b.number("prop_loss_db_per_mm", c.budget_loss_db_per_mm);
        c.budget_length_mm = b.number("length_mm", c.budget_length_mm);
        c.budget_taper_eff = b.number("taper_eff", c.budget_taper_eff);
        c.budget_detector_eff = b.number("detector_eff", c.budget_detector_eff);
        b.finish();
    }

    if (root.has("run")) {
        Section r = root.child("run");
        if (r.has("master_seed")) {
            const json& v = r.raw("master_seed");
            if (!v.is_number_unsigned()) throw ConfigError("run.master_seed: expected a non-negative integer");
            c.master_seed = v.get<std::uint64_t>();
        }
        r.finish();
    }

    if (root.has("paths")) {
        Section p = root.child("paths");
        c.output_dir = p.string("output_dir", c.output_dir);
        p.finish();
    }

    root.finish();
}

}  // namespace

WorkbenchConfig default_config() {
    WorkbenchConfig c;
    MaterialModel ta = tantala_default();
    ta.name = "Ta2O5";
    MaterialModel si = fused_silica_malitson();
    si.name = "SiO2";
    MaterialModel a = air();
    a.name = "air";
    c.materials = {ta, si, a};
    c.geometry.core = ta;
    c.geometry.substrate = si;
    c.geometry.superstrate = a;
    c.tip_widths = {80e-9, 90e-9, 100e-9, 110e-9, 125e-9, 150e-9, 200e-9, 300e-9, 500e-9, 700e-9};
    c.canonical = "{}";
    c.hash = fnv1a64(c.canonical);
    return c;
}

WorkbenchConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    WorkbenchConfig c = default_config();
    apply_document(c, doc);
    c.geometry.validate();
    c.canonical = doc.dump();  // object keys are stored sorted
    c.hash = fnv1a64(c.canonical);
    return c;
}

WorkbenchConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace wgkit
