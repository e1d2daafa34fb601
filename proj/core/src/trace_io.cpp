#include "fanocqed/trace_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "fanocqed/constants.hpp"

namespace fanocqed {

void write_trace_csv(const SpectrumTrace& trace, std::ostream& out) {
    trace.validate();
    out << "# " << schema_version << " spectrum-trace\n";
    out << "# axis: " << to_string(trace.axis) << "\n";
    if (trace.axis == TraceAxis::detuning_hz && trace.omega_ref != 0.0)
        out << "# omega_ref_hz_over_2pi: " << std::setprecision(17)
            << trace.omega_ref / two_pi << "\n";
    out << "# columns: " << to_string(trace.axis) << ",intensity";
    if (!trace.uncertainty.empty()) out << ",uncertainty";
    out << "\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << trace.abscissa[i] << ',' << trace.intensity[i];
        if (!trace.uncertainty.empty()) out << ',' << trace.uncertainty[i];
        out << '\n';
    }
}

void write_trace_csv_file(const SpectrumTrace& trace,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trace_csv(trace, out);
}

namespace {

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

SpectrumTrace read_trace_csv(std::istream& in) {
    SpectrumTrace trace;
    std::string line;
    std::size_t lineno = 0;
    bool saw_axis = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto pos = t.find("axis:");
            if (pos != std::string::npos && t.find("columns:") == std::string::npos) {
                trace.axis = axis_from_string(trimmed(t.substr(pos + 5)));
                saw_axis = true;
            }
            const auto rpos = t.find("omega_ref_hz_over_2pi:");
            if (rpos != std::string::npos)
                trace.omega_ref =
                    std::stod(t.substr(rpos + sizeof("omega_ref_hz_over_2pi:") - 1)) *
                    two_pi;
            continue;
        }
        std::istringstream ss(t);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("trace CSV parse error at line " +
                                         std::to_string(lineno));
            }
        }
        if (row.size() < 2 || row.size() > 3)
            throw std::runtime_error("trace CSV needs 2 or 3 columns (line " +
                                     std::to_string(lineno) + ")");
        trace.abscissa.push_back(row[0]);
        trace.intensity.push_back(row[1]);
        if (row.size() == 3) trace.uncertainty.push_back(row[2]);
    }
    if (!trace.uncertainty.empty() &&
        trace.uncertainty.size() != trace.abscissa.size())
        throw std::runtime_error(
            "trace CSV mixes rows with and without uncertainty");
    (void)saw_axis;  // absent header defaults to detuning_hz
    trace.validate();
    return trace;
}

SpectrumTrace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace CSV: " + path);
    return read_trace_csv(in);
}

}  // namespace fanocqed
