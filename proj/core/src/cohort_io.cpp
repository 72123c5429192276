#include "longmix/data/cohort_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "longmix/errors.hpp"

namespace longmix {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& field, std::size_t line, const char* name) {
  if (field.empty()) throw ParseError(line, std::string("empty field ") + name);
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + field.size())
    throw ParseError(line, std::string("cannot parse ") + name + " from '" + field + "'");
  if (!std::isfinite(v))
    throw ParseError(line, std::string("non-finite value for ") + name);
  return v;
}

int parse_int(const std::string& field, std::size_t line, const char* name) {
  const double v = parse_double(field, line, name);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError(line, std::string(name) + " must be an integer, got '" + field + "'");
  return i;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Cohort load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCohortCsvHeader)
    throw ParseError(1, "header must be exactly '" + std::string(kCohortCsvHeader) + "'");

  Cohort cohort;
  std::map<std::string, std::size_t> index_of;  // subject id -> position
  std::map<std::string, std::vector<std::pair<double, std::size_t>>> seen_ga;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 9)
      throw ParseError(line_no, "expected 9 fields, got " + std::to_string(f.size()));

    Subject row;
    row.id = f[0];
    if (row.id.empty()) throw ParseError(line_no, "empty subject_id");
    Visit visit;
    visit.ga_weeks = parse_double(f[1], line_no, "ga_weeks");
    visit.pcrh = parse_double(f[2], line_no, "pcrh");
    row.ct_sum = parse_int(f[3], line_no, "ct_sum");
    row.bmi = parse_double(f[4], line_no, "bmi");
    row.cses = parse_double(f[5], line_no, "cses");
    row.dces = parse_double(f[6], line_no, "dces");
    row.ob_risk = parse_int(f[7], line_no, "ob_risk");
    row.parity = parse_int(f[8], line_no, "parity");

    if (visit.pcrh <= 0.0) throw ValidationError(line_no, "pcrh must be > 0");
    if (visit.ga_weeks < kGaMin || visit.ga_weeks > kGaMax)
      throw ValidationError(line_no, "ga_weeks outside [14, 40]");
    if (row.ct_sum < 0 || row.ct_sum > 4)
      throw ValidationError(line_no, "ct_sum outside 0..4");
    if (row.parity < 0 || row.parity > 4)
      throw ValidationError(line_no, "parity outside 0..4");
    if (row.ob_risk != 0 && row.ob_risk != 1)
      throw ValidationError(line_no, "ob_risk must be 0 or 1");
    if (row.bmi <= 0.0) throw ValidationError(line_no, "bmi must be > 0");

    const std::string subject_id = row.id;
    auto [it, inserted] = index_of.try_emplace(subject_id, cohort.subjects.size());
    if (inserted) {
      row.visits = {visit};
      cohort.subjects.push_back(std::move(row));
    } else {
      Subject& existing = cohort.subjects[it->second];
      if (existing.ct_sum != row.ct_sum || existing.bmi != row.bmi ||
          existing.cses != row.cses || existing.dces != row.dces ||
          existing.ob_risk != row.ob_risk || existing.parity != row.parity)
        throw ValidationError(line_no, "subject-level columns vary within subject '" +
                                           subject_id + "'");
      existing.visits.push_back(visit);
    }

    auto& gas = seen_ga[subject_id];
    for (const auto& [ga, ln] : gas)
      if (ga == visit.ga_weeks)
        throw ValidationError(line_no, "duplicate (subject_id, ga_weeks) pair, first seen at line " +
                                           std::to_string(ln));
    gas.emplace_back(visit.ga_weeks, line_no);
  }

  if (cohort.subjects.empty()) throw ParseError(line_no, "no data rows");

  for (auto& subject : cohort.subjects)
    std::sort(subject.visits.begin(), subject.visits.end(),
              [](const Visit& a, const Visit& b) { return a.ga_weeks < b.ga_weeks; });
  return cohort;
}

Cohort load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return load_csv(in);
}

void write_csv(const Cohort& cohort, std::ostream& out) {
  out << kCohortCsvHeader << '\n';
  for (const auto& s : cohort.subjects) {
    for (const auto& v : s.visits) {
      out << s.id << ',' << format_double(v.ga_weeks) << ',' << format_double(v.pcrh) << ','
          << s.ct_sum << ',' << format_double(s.bmi) << ',' << format_double(s.cses) << ','
          << format_double(s.dces) << ',' << s.ob_risk << ',' << s.parity << '\n';
    }
  }
}

void write_csv_file(const Cohort& cohort, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(cohort, out);
}

}  // namespace longmix
