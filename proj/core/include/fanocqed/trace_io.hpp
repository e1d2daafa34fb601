#pragma once

#include <iosfwd>
#include <string>

#include "fanocqed/spectrum.hpp"

namespace fanocqed {

inline constexpr const char* schema_version = "fano-cqed/1";

// CSV dialect: comma separated, '.' decimal, '#'-prefixed header comments.
// The schema version, axis kind, optional detuning reference and column
// names are stamped as comments.
void write_trace_csv(const SpectrumTrace& trace, std::ostream& out);
void write_trace_csv_file(const SpectrumTrace& trace, const std::string& path);

SpectrumTrace read_trace_csv(std::istream& in);
SpectrumTrace read_trace_csv_file(const std::string& path);

}  // namespace fanocqed
