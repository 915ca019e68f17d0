#include "stovol/report.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stovol::report {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

} // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, bool timestamp) {
    auto out = open_or_throw(path);
    if (timestamp) out << "# generated " << now_iso() << "\n";
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
        out << "\n";
    }
}

void write_gnuplot(const std::string& path, const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows, bool timestamp) {
    auto out = open_or_throw(path);
    if (timestamp) out << "# generated " << now_iso() << "\n";
    out << "#";
    for (const auto& c : columns) out << " " << c;
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << fmt17(row[i]);
        out << "\n";
    }
}

std::string assumption_report_json(const AssumptionReport& rep) {
    json j;
    j["sector_angle"] = rep.sector_angle;
    j["rho_sector"] = rep.rho_sector;
    j["rho_growth"] = rep.rho_growth;
    j["rho_growth_fit"] = rep.growth.rho_growth_fit;
    j["monotone_order"] = rep.monotone_order;
    j["lp_membership"] = rep.lp_membership;
    j["regularity_constants"] = rep.regularity_constants;
    j["all_pass"] = rep.all_pass;
    j["conditions"] = json::array();
    for (const auto& c : rep.conditions)
        j["conditions"].push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                                   {"pass", c.pass}});
    j["growth"] = {{"mu", rep.growth.mu},
                   {"integral1", rep.growth.integral1},
                   {"integral2", rep.growth.integral2},
                   {"product1", rep.growth.product1},
                   {"i2_tail_slope", rep.growth.i2_tail_slope}};
    j["growth"]["candidates"] = json::array();
    for (const auto& c : rep.growth.candidates)
        j["growth"]["candidates"].push_back(
            {{"rho", c.rho}, {"tail_slope", c.tail_slope}, {"max_min_ratio", c.max_min_ratio}, {"pass", c.pass}});
    if (!rep.b_smooth_ratio.empty()) j["b_smooth_ratio"] = rep.b_smooth_ratio;
    return j.dump(2) + "\n";
}

std::string regularity_report_json(const RegularityReport& rep) {
    json j;
    j["r"] = rep.r;
    j["rho"] = rep.rho;
    j["n_paths"] = rep.n_paths;
    j["p"] = rep.p_moment;
    j["entries"] = json::array();
    for (const auto& e : rep.entries) {
        json je;
        je["s"] = e.s;
        je["kappa"] = e.kappa;
        je["predicted"] = e.predicted;
        je["slope"] = e.slope;
        je["ci"] = e.ci;
        je["pass"] = e.pass;
        je["lags"] = e.lags;
        je["values"] = e.values;
        j["entries"].push_back(je);
    }
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) {
    auto out = open_or_throw(path);
    out << content;
}

void write_resolvent_table_csv(const std::string& path, const ScalarResolventTable& table, bool timestamp) {
    std::vector<std::vector<double>> rows;
    const auto& t = table.grid->nodes;
    for (size_t j = 0; j < t.size(); ++j)
        rows.push_back({t[j], table.s[j], table.sdot[j], table.sddot[j]});
    write_csv(path, {"t", "s", "sdot", "sddot"}, rows, timestamp);
}

void regularity_report_files(const std::string& dir, const std::string& stem, const RegularityReport& rep,
                             bool timestamp) {
    write_text(dir + "/" + stem + ".json", regularity_report_json(rep));
    std::vector<std::vector<double>> rows;
    for (const auto& e : rep.entries)
        for (size_t li = 0; li < e.lags.size(); ++li)
            rows.push_back({e.s, e.lags[li], e.values[li], e.slope, e.predicted, e.pass ? 1.0 : 0.0});
    write_csv(dir + "/" + stem + ".csv", {"s", "h", "D", "slope", "predicted", "pass"}, rows, timestamp);
    write_gnuplot(dir + "/" + stem + ".dat", {"s", "h", "D"}, rows, timestamp);
}

} // namespace stovol::report
