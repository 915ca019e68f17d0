#include "stovol/config.hpp"

#include "stovol/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace stovol {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

void ConfigFile::apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got: " + spec);
    const std::string path = trim(spec.substr(0, eq));
    const std::string value = trim(spec.substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ConfigError("--set key must be section.key, got: " + path);
    sections_[path.substr(0, dot)][path.substr(dot + 1)] = value;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

void ConfigFile::missing(const std::string& section, const std::string& key) const {
    throw ConfigError(section + "." + key + ": required");
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    if (!has(section, key)) missing(section, key);
    return sections_.at(section).at(key);
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError(section + "." + key + ": not a number: '" + v + "'");
    }
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long long ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw ConfigError(section + "." + key + ": not an integer: '" + v + "'");
    }
}

long long ConfigFile::get_int_or(const std::string& section, const std::string& key, long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError(section + "." + key + ": not a number in list: '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(section + "." + key + ": empty list");
    return out;
}

std::vector<double> ConfigFile::get_list_or(const std::string& section, const std::string& key,
                                            std::vector<double> fallback) const {
    return has(section, key) ? get_list(section, key) : fallback;
}

TimeGrid DiscretizationConfig::make_grid() const {
    return grid_kind == TimeGrid::Kind::Uniform ? TimeGrid::uniform(horizon, n_steps)
                                                : TimeGrid::graded(horizon, n_steps, grading);
}

ProblemSpec ExperimentConfig::problem() const {
    ProblemSpec ps{kernel, SpectralBasis(disc.n_modes), cov, f_map, g_map, u0, disc.horizon, r, rho,
                   meas.p_moment};
    return ps;
}

ExperimentConfig ExperimentConfig::from(const ConfigFile& file) {
    ExperimentConfig cfg;

    const std::string variant = file.get_string("kernel", "variant");
    if (variant == "tempered_riesz") {
        const double rho = file.get_double("kernel", "rho");
        const double eta = file.get_double_or("kernel", "eta", 0.0);
        cfg.kernel = KernelSpec::tempered_riesz(rho, eta);
        cfg.rho = rho;
    } else if (variant == "finite_history") {
        const double rho = file.get_double("kernel", "rho");
        cfg.kernel = KernelSpec::finite_history(rho);
        cfg.rho = rho;
    } else if (variant == "laplace_example") {
        cfg.kernel = KernelSpec::laplace_example();
        cfg.rho = file.get_double_or("kernel", "rho", 1.4);
    } else {
        throw ConfigError("kernel.variant: unknown variant '" + variant + "'");
    }

    cfg.disc.n_modes = static_cast<int>(file.get_int_or("discretization", "n_modes", 64));
    cfg.disc.n_steps = static_cast<int>(file.get_int_or("discretization", "n_steps", 512));
    cfg.disc.horizon = file.get_double_or("discretization", "horizon", 1.0);
    const std::string gk = file.get_string_or("discretization", "grid", "uniform");
    if (gk == "uniform")
        cfg.disc.grid_kind = TimeGrid::Kind::Uniform;
    else if (gk == "graded")
        cfg.disc.grid_kind = TimeGrid::Kind::Graded;
    else
        throw ConfigError("discretization.grid: must be uniform or graded, got '" + gk + "'");
    cfg.disc.grading = file.get_double_or("discretization", "grading", 2.0);
    if (cfg.disc.n_modes < 1) throw ConfigError("discretization.n_modes: must be >= 1");
    if (cfg.disc.n_steps < 2) throw ConfigError("discretization.n_steps: must be >= 2");
    if (cfg.disc.horizon <= 0) throw ConfigError("discretization.horizon: must be > 0");

    const std::string cov = file.get_string_or("noise", "covariance", "power_diagonal");
    if (cov == "white")
        cfg.cov = CovarianceSpec::white();
    else if (cov == "power_diagonal")
        cfg.cov = CovarianceSpec::power_diagonal(file.get_double_or("noise", "gamma", 1.0));
    else if (cov == "custom_diagonal")
        cfg.cov = CovarianceSpec::custom_diagonal(file.get_list("noise", "q"));
    else
        throw ConfigError("noise.covariance: unknown variant '" + cov + "'");
    cfg.seed = static_cast<std::uint64_t>(file.get_int_or("noise", "seed", 42));
    cfg.n_paths = static_cast<int>(file.get_int_or("noise", "n_paths", 200));
    if (cfg.n_paths < 1) throw ConfigError("noise.n_paths: must be >= 1");

    const std::string fmap = file.get_string_or("problem", "f_map", "zero");
    if (fmap == "zero")
        cfg.f_map = FMap::zero();
    else if (fmap == "nemytskii_sin")
        cfg.f_map = FMap::nemytskii(ScalarTag::Sin, file.get_double_or("problem", "f_lipschitz", 1.0));
    else if (fmap == "nemytskii_atan")
        cfg.f_map = FMap::nemytskii(ScalarTag::Atan, file.get_double_or("problem", "f_lipschitz", 1.0));
    else if (fmap == "diagonal_linear") {
        std::vector<double> c(cfg.disc.n_modes, file.get_double_or("problem", "f_coeff", 1.0));
        cfg.f_map = FMap::diagonal_linear(std::move(c));
    } else
        throw ConfigError("problem.f_map: unknown variant '" + fmap + "'");

    const std::string gmap = file.get_string_or("problem", "g_map", "additive_identity");
    if (gmap == "zero_noise")
        cfg.g_map = GMap::zero_noise();
    else if (gmap == "additive_identity")
        cfg.g_map = GMap::additive_identity();
    else if (gmap == "nemytskii_sin")
        cfg.g_map = GMap::nemytskii_multiplicative(ScalarTag::Sin, file.get_double_or("problem", "g_lipschitz", 1.0));
    else if (gmap == "nemytskii_atan")
        cfg.g_map = GMap::nemytskii_multiplicative(ScalarTag::Atan, file.get_double_or("problem", "g_lipschitz", 1.0));
    else if (gmap == "diagonal_multiplicative") {
        std::vector<double> g(cfg.disc.n_modes, file.get_double_or("problem", "g_coeff", 1.0));
        cfg.g_map = GMap::diagonal_multiplicative(std::move(g));
    } else
        throw ConfigError("problem.g_map: unknown variant '" + gmap + "'");

    {
        SpectralField u0(cfg.disc.n_modes);
        const std::string u0spec = file.get_string_or("problem", "u0", "zero");
        if (u0spec == "zero") {
        } else if (u0spec.rfind("mode:", 0) == 0) {
            const int k = std::stoi(u0spec.substr(5));
            if (k < 1 || k > cfg.disc.n_modes) throw ConfigError("problem.u0: mode index out of range");
            u0.coeffs[k - 1] = file.get_double_or("problem", "u0_amplitude", 1.0);
        } else {
            throw ConfigError("problem.u0: expected 'zero' or 'mode:<k>', got '" + u0spec + "'");
        }
        cfg.u0 = U0Spec::deterministic(std::move(u0));
    }

    cfg.r = file.get_double_or("problem", "r", 1.0 - 1.0 / cfg.rho);
    if (!(cfg.r < 1.0)) throw ConfigError("problem.r: must be < 1");
    cfg.meas.p_moment = static_cast<int>(file.get_int_or("problem", "p", 2));
    if (cfg.meas.p_moment < 2) throw ConfigError("problem.p: moment order must be >= 2");

    cfg.picard.tol = file.get_double_or("problem", "tol", 1e-8);
    cfg.picard.max_iter = static_cast<int>(file.get_int_or("problem", "max_iter", 30));
    cfg.picard.alpha0 = file.get_double_or("problem", "alpha0", 0.0);

    cfg.meas.s_values = file.get_list_or("measurement", "s_values", {0.0});
    cfg.meas.lag_k_min = static_cast<int>(file.get_int_or("measurement", "lag_k_min", 3));
    cfg.meas.lag_k_max = static_cast<int>(file.get_int_or("measurement", "lag_k_max", 9));
    cfg.meas.tolerance = file.get_double_or("measurement", "tolerance", 0.05);
    cfg.meas.beta_grid = file.get_list_or("measurement", "beta_grid", {});
    if (cfg.meas.lag_k_min < 1 || cfg.meas.lag_k_max < cfg.meas.lag_k_min)
        throw ConfigError("measurement.lag_k_min/lag_k_max: need 1 <= k_min <= k_max");
    for (double s : cfg.meas.s_values)
        if (!(s < cfg.r - 1.0 + 2.0 / cfg.rho))
            throw ConfigError("measurement.s_values: s must stay below r - 1 + 2/rho");

    cfg.output.directory = file.get_string_or("output", "directory", "out");
    cfg.output.timestamp = file.get_int_or("output", "timestamp", 1) != 0;
    return cfg;
}

} // namespace stovol
