#ifndef DGHEAT_IO_HPP
#define DGHEAT_IO_HPP

#include <iosfwd>
#include <map>
#include <string>

#include "dgheat/adapt.hpp"
#include "dgheat/fem.hpp"

namespace dgheat {

// Full round-trip precision formatting for every floating-point column.
std::string fmt(double v);

// Per-step CSV: header plus one row per accepted step.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const StepRecord& rec);

// Summary as a key = value block.
void write_summary(std::ostream& os, const RunSummary& s);

// "x value" sample table of a field, n samples per element.
void write_field(std::ostream& os, const SpatialField& f, int samples_per_element);

// Flat key = value configuration file; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

} // namespace dgheat

#endif
