#ifndef STOVOL_REPORT_HPP
#define STOVOL_REPORT_HPP

#include "stovol/certify.hpp"
#include "stovol/regularity.hpp"
#include "stovol/scalar_resolvent.hpp"

#include <string>
#include <vector>

namespace stovol::report {

/// %.17g rendering used by every data file.
std::string fmt17(double v);

struct WriterOptions {
    bool timestamp = true;
    std::string out_dir = ".";
};

/// CSV with a header row; optional "# generated <iso time>" first line.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, bool timestamp);

/// whitespace-separated gnuplot data block
void write_gnuplot(const std::string& path, const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows, bool timestamp);

std::string assumption_report_json(const AssumptionReport& rep);
std::string regularity_report_json(const RegularityReport& rep);

void write_text(const std::string& path, const std::string& content);

void write_resolvent_table_csv(const std::string& path, const ScalarResolventTable& table, bool timestamp);

void regularity_report_files(const std::string& dir, const std::string& stem, const RegularityReport& rep,
                             bool timestamp);

} // namespace stovol::report

#endif
