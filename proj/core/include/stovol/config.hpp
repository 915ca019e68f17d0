#ifndef STOVOL_CONFIG_HPP
#define STOVOL_CONFIG_HPP

#include "stovol/mild.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stovol {

/// Line-oriented "[section] key = value" text format. '#' starts a comment;
/// lists are comma-separated. Errors carry the offending line number or the
/// dotted key name.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

    /// "--set section.key=value" style override
    void apply_override(const std::string& spec);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key, long long fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_list_or(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
    [[noreturn]] void missing(const std::string& section, const std::string& key) const;
};

struct DiscretizationConfig {
    int n_modes = 64;
    int n_steps = 512;
    TimeGrid::Kind grid_kind = TimeGrid::Kind::Uniform;
    double grading = 2.0;
    double horizon = 1.0;
    TimeGrid make_grid() const;
};

struct MeasurementConfig {
    std::vector<double> s_values{0.0};
    int lag_k_min = 3;
    int lag_k_max = 9;
    int p_moment = 2;
    double tolerance = 0.05;
    std::vector<double> beta_grid;
};

struct OutputConfig {
    std::string directory = "out";
    bool timestamp = true;
};

/// Fully validated experiment description assembled from a ConfigFile.
struct ExperimentConfig {
    KernelSpec kernel{KernelSpec::tempered_riesz(1.5)};
    double rho = 1.5;
    DiscretizationConfig disc;
    CovarianceSpec cov = CovarianceSpec::power_diagonal(1.0);
    std::uint64_t seed = 42;
    int n_paths = 200;
    FMap f_map;
    GMap g_map;
    U0Spec u0;
    double r = 0.0;
    PicardOptions picard;
    MeasurementConfig meas;
    OutputConfig output;

    ProblemSpec problem() const;

    static ExperimentConfig from(const ConfigFile& file);
};

} // namespace stovol

#endif
