#include "chanest/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chanest {

namespace {

const std::vector<std::string> kKnownQuantities = {"lb", "mmse_t1", "mmse_oracle", "lmmse",
                                                   "asymptote"};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& key, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line << ", key '" << key << "': " << what;
    throw std::invalid_argument(msg.str());
}

double parse_double(std::size_t line, const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(line, key, "expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_count(std::size_t line, const std::string& key, const std::string& value) {
    const double v = parse_double(line, key, value);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e18)
        fail(line, key, "expected a nonnegative integer, got '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i"; exponents in either part.
std::complex<double> parse_complex(std::size_t line, const std::string& key,
                                   const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) fail(line, key, "empty matrix entry");
    if (s.back() != 'i' && s.back() != 'I')
        return {parse_double(line, key, s), 0.0};
    s.pop_back();
    // Split the remainder at the last sign that is not a leading sign or an
    // exponent sign.
    std::size_t cut = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    auto imag_of = [&](const std::string& part) {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return parse_double(line, key, part);
    };
    if (cut == std::string::npos) return {0.0, imag_of(s)};
    return {parse_double(line, key, s.substr(0, cut)), imag_of(s.substr(cut))};
}

ComplexMatrix parse_pilot_matrix(std::size_t line, const std::string& text, std::size_t m,
                                 std::size_t t) {
    if (trim(text) == "identity") {
        if (m != t)
            fail(line, "pilot_matrix",
                 "'identity' requires T == M (got M=" + std::to_string(m) +
                     ", T=" + std::to_string(t) + ")");
        return ComplexMatrix::identity(m);
    }
    std::string clean = text;
    std::erase(clean, '[');
    std::erase(clean, ']');
    const std::vector<std::string> rows = split(clean, ';');
    if (rows.size() != m)
        fail(line, "pilot_matrix", "expected " + std::to_string(m) + " rows");
    ComplexMatrix x(m, t);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<std::string> entries = split(rows[i], ',');
        if (entries.size() != t)
            fail(line, "pilot_matrix",
                 "row " + std::to_string(i) + ": expected " + std::to_string(t) + " entries");
        for (std::size_t j = 0; j < t; ++j)
            x(i, j) = parse_complex(line, "pilot_matrix", entries[j]);
    }
    return x;
}

std::vector<PilotAtom> parse_scalar_pilot(std::size_t line, const std::string& value) {
    std::vector<PilotAtom> atoms;
    for (const std::string& part : split(value, ',')) {
        const auto colon = part.find(':');
        PilotAtom atom;
        if (colon == std::string::npos) {
            atom.value = parse_double(line, "pilot", part);
            atom.prob = 1.0;
        } else {
            atom.value = parse_double(line, "pilot", part.substr(0, colon));
            atom.prob = parse_double(line, "pilot", part.substr(colon + 1));
        }
        atoms.push_back(atom);
    }
    if (atoms.size() == 1) atoms.front().prob = 1.0;
    return atoms;
}

}  // namespace

bool ExperimentConfig::wants(const std::string& quantity) const {
    return std::find(quantities.begin(), quantities.end(), quantity) != quantities.end();
}

std::uint64_t ExperimentConfig::effective_lb_trials() const {
    if (lb_trials > 0) return lb_trials;
    if (model == "scalar") return trials;
    return std::max<std::uint64_t>(2000, trials / 100);
}

ScalarChannelSpec ExperimentConfig::scalar_spec(double sigma_s2) const {
    ScalarChannelSpec spec;
    spec.alpha = alpha;
    spec.sigma_h2 = sigma_h2;
    spec.sigma_s2 = sigma_s2;
    spec.pilot = pilot_scalar;
    spec.validate();
    return spec;
}

VectorChannelSpec ExperimentConfig::vector_spec(double sigma_s2) const {
    VectorChannelSpec spec;
    spec.alpha = alpha;
    spec.sigma_h2 = sigma_h2;
    spec.sigma_s2 = sigma_s2;
    spec.m = m;
    spec.n = n;
    spec.t = t;
    spec.power_budget = power_budget;
    spec.pilot = {{parse_pilot_matrix(0, pilot_matrix_text, m, t), 1.0}};
    spec.validate();
    return spec;
}

void ExperimentConfig::validate() const {
    if (model != "scalar" && model != "vector")
        throw std::invalid_argument("config key 'model': must be 'scalar' or 'vector'");
    if (grid.empty()) throw std::invalid_argument("config key 'grid': no grid points");
    for (double g : grid)
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("config key 'grid': values must be positive");
    if (trials == 0) throw std::invalid_argument("config key 'trials': must be >= 1");
    if (inner_trials < 2)
        throw std::invalid_argument("config key 'inner_trials': must be >= 2");
    if (inner_method != "quadrature" && inner_method != "mc")
        throw std::invalid_argument("config key 'inner_method': must be 'quadrature' or 'mc'");
    if (quantities.empty())
        throw std::invalid_argument("config key 'quantities': at least one required");
    for (const std::string& q : quantities)
        if (std::find(kKnownQuantities.begin(), kKnownQuantities.end(), q) ==
            kKnownQuantities.end())
            throw std::invalid_argument("config key 'quantities': unknown quantity '" + q + "'");
    if (model == "scalar") {
        const ScalarChannelSpec spec = scalar_spec(grid.front());
        if (wants("lb") || wants("mmse_t1") || wants("mmse_oracle") || wants("asymptote"))
            spec.validate_nonzero_pilot();
    } else {
        vector_spec(grid.front());
    }
}

std::vector<double> make_log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("make_log_grid: need 0 < lo < hi and points >= 2");
    std::vector<double> grid(points);
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(points - 1));
    return grid;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.grid.clear();
    double grid_min = 1e-4, grid_max = 1e1;
    std::size_t grid_points = 20;
    bool grid_range_touched = false;
    bool quantities_touched = false;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail(line_no, key, "empty value");

        if (key == "model") {
            if (value != "scalar" && value != "vector")
                fail(line_no, key, "must be 'scalar' or 'vector'");
            cfg.model = value;
        } else if (key == "alpha") {
            cfg.alpha = parse_double(line_no, key, value);
            if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
                fail(line_no, key, "must be in (0, 1]");
        } else if (key == "sigma_h2") {
            cfg.sigma_h2 = parse_double(line_no, key, value);
            if (!(cfg.sigma_h2 > 0.0)) fail(line_no, key, "must be positive");
        } else if (key == "grid") {
            cfg.grid.clear();
            for (const std::string& part : split(value, ','))
                cfg.grid.push_back(parse_double(line_no, key, part));
        } else if (key == "grid_min") {
            grid_min = parse_double(line_no, key, value);
            grid_range_touched = true;
        } else if (key == "grid_max") {
            grid_max = parse_double(line_no, key, value);
            grid_range_touched = true;
        } else if (key == "grid_points") {
            grid_points = parse_count(line_no, key, value);
            grid_range_touched = true;
        } else if (key == "trials") {
            cfg.trials = parse_count(line_no, key, value);
        } else if (key == "inner_trials") {
            cfg.inner_trials = parse_count(line_no, key, value);
        } else if (key == "lb_trials") {
            cfg.lb_trials = parse_count(line_no, key, value);
        } else if (key == "seed") {
            cfg.seed = parse_count(line_no, key, value);
        } else if (key == "csv") {
            cfg.csv_path = value;
        } else if (key == "svg") {
            cfg.svg_path = value;
        } else if (key == "quantities") {
            cfg.quantities = split(value, ',');
            quantities_touched = true;
        } else if (key == "pilot") {
            cfg.pilot_scalar = parse_scalar_pilot(line_no, value);
        } else if (key == "inner_method") {
            if (value != "quadrature" && value != "mc")
                fail(line_no, key, "must be 'quadrature' or 'mc'");
            cfg.inner_method = value;
        } else if (key == "M") {
            cfg.m = parse_count(line_no, key, value);
        } else if (key == "N") {
            cfg.n = parse_count(line_no, key, value);
        } else if (key == "T") {
            cfg.t = parse_count(line_no, key, value);
        } else if (key == "pilot_matrix") {
            cfg.pilot_matrix_text = value;
        } else if (key == "power_budget") {
            cfg.power_budget = parse_double(line_no, key, value);
        } else {
            fail(line_no, key, "unknown key");
        }
    }
    (void)quantities_touched;
    if (cfg.grid.empty()) cfg.grid = make_log_grid(grid_min, grid_max, grid_points);
    else if (grid_range_touched)
        throw std::invalid_argument("config: 'grid' conflicts with grid_min/grid_max/grid_points");

    cfg.validate();
    return cfg;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2"}; }

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.grid = make_log_grid(1e-4, 1e1, 20);
    if (name == "fig1") {
        cfg.model = "scalar";
        cfg.alpha = 0.4;
        cfg.sigma_h2 = 1.0;
        cfg.pilot_scalar = {{1.0, 1.0}};
        cfg.trials = 1000000;
        cfg.seed = 1;
        cfg.csv_path = "fig1.csv";
        cfg.svg_path = "fig1.svg";
    } else if (name == "fig2") {
        cfg.model = "vector";
        cfg.alpha = 0.4;
        cfg.sigma_h2 = 1.0;
        cfg.m = cfg.n = cfg.t = 4;
        cfg.pilot_matrix_text = "identity";
        cfg.trials = 1000000;
        cfg.inner_trials = 2000;
        cfg.seed = 2;
        cfg.csv_path = "fig2.csv";
        cfg.svg_path = "fig2.svg";
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (see `presets`)");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& source) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), source) != names.end()) return preset(source);
    std::ifstream in(source);
    if (!in) throw std::invalid_argument("cannot open config file '" + source + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig cfg = parse_config(buffer.str());
    cfg.name = source;
    return cfg;
}

}  // namespace chanest
