#pragma once

// Text format for standalone flow-placement instances and the CSV dump of
// their solutions. Grammar in docs/formats.md.

#include <ostream>
#include <string>
#include <string_view>

#include "sctsn/tsor.hpp"

namespace sctsn::tsor {

/// Throws ParseError (with line) or ValidationError.
TsorInstance parse_instance(std::string_view text);
TsorInstance load_instance_file(const std::string& path);

std::string format_instance(const TsorInstance& inst);

/// Columns: kind,demand,path,link,class,value. The first row carries the
/// objective; x rows list every candidate, g rows every link and class of S.
void write_solution_csv(std::ostream& os, const TsorInstance& inst, const TsorSolution& sol);

void write_residuals(std::ostream& os, const Residuals& r);

} // namespace sctsn::tsor
