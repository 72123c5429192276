#pragma once

#include <iosfwd>
#include <string>

#include "longmix/data/cohort.hpp"

namespace longmix {

// Long-format CSV, UTF-8, one row per visit. Header is exactly:
//   subject_id,ga_weeks,pcrh,ct_sum,bmi,cses,dces,ob_risk,parity
// Subject-level columns repeat per row and must be constant within a subject.
inline constexpr const char* kCohortCsvHeader =
    "subject_id,ga_weeks,pcrh,ct_sum,bmi,cses,dces,ob_risk,parity";

// Throws ParseError (malformed row, with line number) or ValidationError
// (invariant violation, with line number). Rows may arrive in any order;
// visits are grouped by subject id and sorted by gestational age.
Cohort load_csv(std::istream& in);
Cohort load_csv_file(const std::string& path);

// Numeric fields are written with 17 significant digits so that
// load -> write -> load round-trips bit-exactly.
void write_csv(const Cohort& cohort, std::ostream& out);
void write_csv_file(const Cohort& cohort, const std::string& path);

// Shortest-exact decimal text for a double (17 significant digits).
std::string format_double(double v);

}  // namespace longmix
