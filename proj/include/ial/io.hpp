#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ial/generate.hpp"
#include "ial/outer.hpp"
#include "ial/problem.hpp"
#include "ial/theory.hpp"

namespace ial {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- canonical serialization ------------------------------------------------
//
// Sorted keys (nlohmann objects are std::map-backed), no whitespace, floats
// as %.16e (17 significant digits, exact round trip). Writing the same value
// twice produces byte-identical files.

namespace detail {

inline void dump_double(double v, std::string& out) {
  if (!std::isfinite(v)) throw IoError("canonical json: non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  out += buf;
}

inline void dump_string(const std::string& s, std::string& out) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(ch));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

inline void dump_canonical_impl(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump_string(it.key(), out);
        out += ':';
        dump_canonical_impl(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        dump_canonical_impl(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::string: dump_string(j.get_ref<const std::string&>(), out); break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: dump_double(j.get<double>(), out); break;
    case json::value_t::null: out += "null"; break;
    default: throw IoError("canonical json: unsupported value type");
  }
}

}  // namespace detail

inline std::string dump_canonical(const json& j) {
  std::string out;
  detail::dump_canonical_impl(j, out);
  out += '\n';
  return out;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << data;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string hash_file(const std::filesystem::path& path) {
  return to_hex16(fnv1a64(read_file(path)));
}

// --- instance JSON -----------------------------------------------------------

namespace detail {

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Matrix matrix_from_json(const json& j, Index rows, Index cols, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw IoError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw IoError(std::string(what) + ": expected " + std::to_string(cols) + " columns");
    }
    for (Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

inline Vector vector_from_json(const json& j, Index n, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    throw IoError(std::string(what) + ": expected length " + std::to_string(n));
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + ": expected an array");
  return vector_from_json(j, static_cast<Index>(j.size()), what);
}

inline void validate_keys(const json& j, std::initializer_list<const char*> allowed,
                          const char* context) {
  if (!j.is_object()) throw IoError(std::string(context) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw IoError(std::string(context) + ": unknown field '" + it.key() + "'");
  }
  for (const char* k : allowed) {
    if (!j.contains(k)) throw IoError(std::string(context) + ": missing field '" + k + "'");
  }
}

}  // namespace detail

inline json instance_to_json(const ProblemInstance& p) {
  p.validate();
  json j;
  j["name"] = p.name;
  j["n"] = static_cast<std::int64_t>(p.dim());
  j["m"] = static_cast<std::int64_t>(p.constraint_dim());
  j["A"] = detail::matrix_to_json(p.constraint.A);
  j["b"] = detail::vector_to_json(p.constraint.b);

  json f;
  switch (p.smooth.kind()) {
    case SmoothTerm::Kind::zero: f["type"] = "zero"; break;
    case SmoothTerm::Kind::quadratic: {
      f["type"] = "quadratic";
      f["Q"] = detail::matrix_to_json(p.smooth.as_quadratic().Q);
      f["c"] = detail::vector_to_json(p.smooth.as_quadratic().c);
      break;
    }
    case SmoothTerm::Kind::least_squares: {
      f["type"] = "least_squares";
      f["M"] = detail::matrix_to_json(p.smooth.as_least_squares().M);
      f["y"] = detail::vector_to_json(p.smooth.as_least_squares().y);
      break;
    }
  }
  j["f"] = std::move(f);

  json g;
  switch (p.composite.kind()) {
    case CompositeTerm::Kind::simplex: {
      g["type"] = "simplex";
      g["radius"] = p.composite.as_simplex().radius;
      break;
    }
    case CompositeTerm::Kind::box: {
      g["type"] = "box";
      g["lo"] = detail::vector_to_json(p.composite.as_box().lo);
      g["hi"] = detail::vector_to_json(p.composite.as_box().hi);
      break;
    }
    case CompositeTerm::Kind::l1_box: {
      g["type"] = "l1_box";
      g["tau"] = p.composite.as_l1_box().tau;
      g["radius"] = p.composite.as_l1_box().radius;
      break;
    }
  }
  j["g"] = std::move(g);
  return j;
}

inline ProblemInstance instance_from_json(const json& j) {
  detail::validate_keys(j, {"A", "b", "f", "g", "m", "n", "name"}, "instance");
  Index n = j["n"].get<Index>();
  Index m = j["m"].get<Index>();
  if (n < 1 || m < 1) throw IoError("instance: need n >= 1 and m >= 1");
  Matrix A = detail::matrix_from_json(j["A"], m, n, "instance A");
  Vector b = detail::vector_from_json(j["b"], m, "instance b");

  const json& f = j["f"];
  if (!f.is_object() || !f.contains("type")) throw IoError("instance f: missing type");
  std::string ftype = f["type"].get<std::string>();
  std::optional<SmoothTerm> smooth;
  if (ftype == "zero") {
    detail::validate_keys(f, {"type"}, "instance f(zero)");
    smooth = SmoothTerm::zero(n);
  } else if (ftype == "quadratic") {
    detail::validate_keys(f, {"Q", "c", "type"}, "instance f(quadratic)");
    smooth = SmoothTerm::quadratic(detail::matrix_from_json(f["Q"], n, n, "instance Q"),
                                   detail::vector_from_json(f["c"], n, "instance c"));
  } else if (ftype == "least_squares") {
    detail::validate_keys(f, {"M", "type", "y"}, "instance f(least_squares)");
    const json& M = f["M"];
    if (!M.is_array() || M.empty()) throw IoError("instance M: expected a nonempty array");
    Index rows = static_cast<Index>(M.size());
    smooth = SmoothTerm::least_squares(detail::matrix_from_json(M, rows, n, "instance M"),
                                       detail::vector_from_json(f["y"], rows, "instance y"));
  } else {
    throw IoError("instance f: unknown type '" + ftype + "'");
  }

  const json& g = j["g"];
  if (!g.is_object() || !g.contains("type")) throw IoError("instance g: missing type");
  std::string gtype = g["type"].get<std::string>();
  std::optional<CompositeTerm> composite;
  if (gtype == "simplex") {
    detail::validate_keys(g, {"radius", "type"}, "instance g(simplex)");
    composite = CompositeTerm::simplex(n, g["radius"].get<double>());
  } else if (gtype == "box") {
    detail::validate_keys(g, {"hi", "lo", "type"}, "instance g(box)");
    composite = CompositeTerm::box(detail::vector_from_json(g["lo"], n, "instance lo"),
                                   detail::vector_from_json(g["hi"], n, "instance hi"));
  } else if (gtype == "l1_box") {
    detail::validate_keys(g, {"radius", "tau", "type"}, "instance g(l1_box)");
    composite = CompositeTerm::l1_box(n, g["tau"].get<double>(), g["radius"].get<double>());
  } else {
    throw IoError("instance g: unknown type '" + gtype + "'");
  }

  ProblemInstance p{std::move(*smooth), std::move(*composite),
                    LinearConstraint::make(std::move(A), std::move(b)),
                    j["name"].get<std::string>()};
  p.validate();
  return p;
}

inline void save_instance(const ProblemInstance& p, const std::filesystem::path& path) {
  write_file(path, dump_canonical(instance_to_json(p)));
}

inline ProblemInstance load_instance(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError("instance parse error in " + path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

// --- trace CSV ----------------------------------------------------------------

inline constexpr const char* kTraceHeader = "k,eta,gap,feas,F,albar,inner_iters";

struct TraceRowScalars {
  long k = 0;
  double eta = 0.0;
  double gap = 0.0;
  double feas = 0.0;
  double objective = 0.0;
  double al_bar = 0.0;
  long inner_iters = 0;
};

inline std::string trace_to_csv(const OuterTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    out += buf;
  };
  for (const OuterRow& row : trace.rows) {
    out += std::to_string(row.k);
    out += ',';
    put(row.eta);
    out += ',';
    put(row.gap);
    out += ',';
    put(row.feas);
    out += ',';
    put(row.objective);
    out += ',';
    put(row.al_bar);
    out += ',';
    out += std::to_string(row.inner_iters);
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const OuterTrace& trace, const std::filesystem::path& path) {
  write_file(path, trace_to_csv(trace));
}

inline std::vector<TraceRowScalars> read_trace_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace csv: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    throw IoError("trace csv: unknown header '" + line + "' (expected '" + kTraceHeader + "')");
  }
  std::vector<TraceRowScalars> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw IoError("trace csv: malformed row '" + line + "'");
    TraceRowScalars r;
    r.k = std::stol(fields[0]);
    r.eta = std::stod(fields[1]);
    r.gap = std::stod(fields[2]);
    r.feas = std::stod(fields[3]);
    r.objective = std::stod(fields[4]);
    r.al_bar = std::stod(fields[5]);
    r.inner_iters = std::stol(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

// --- schedule / reference / report JSON ----------------------------------------

inline json schedule_to_json(const ToleranceSchedule& sch) {
  json j;
  if (sch.kind == ScheduleKind::power_law) {
    j["type"] = "power_law";
    j["sigma"] = sch.sigma;
    j["alpha"] = sch.alpha;
  } else {
    j["type"] = "custom_list";
    json vals = json::array();
    for (double v : sch.values) vals.push_back(v);
    j["values"] = std::move(vals);
  }
  return j;
}

inline ToleranceSchedule schedule_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw IoError("schedule: missing type");
  std::string type = j["type"].get<std::string>();
  if (type == "power_law") {
    detail::validate_keys(j, {"alpha", "sigma", "type"}, "schedule(power_law)");
    return ToleranceSchedule::power_law(j["sigma"].get<double>(), j["alpha"].get<double>());
  }
  if (type == "custom_list") {
    detail::validate_keys(j, {"type", "values"}, "schedule(custom_list)");
    std::vector<double> vals;
    for (const json& v : j["values"]) vals.push_back(v.get<double>());
    return ToleranceSchedule::custom(std::move(vals));
  }
  throw IoError("schedule: unknown type '" + type + "'");
}

inline json reference_to_json(const ReferenceSolution& ref) {
  json j;
  j["f_star"] = ref.f_star;
  j["feas"] = ref.feas;
  j["lambda_star"] = detail::vector_to_json(ref.lambda_star);
  j["tol"] = ref.tol;
  j["x_star"] = detail::vector_to_json(ref.x_star);
  return j;
}

inline ReferenceSolution reference_from_json(const json& j) {
  detail::validate_keys(j, {"f_star", "feas", "lambda_star", "tol", "x_star"}, "reference");
  ReferenceSolution ref;
  ref.f_star = j["f_star"].get<double>();
  ref.feas = j["feas"].get<double>();
  ref.lambda_star = detail::vector_from_json(j["lambda_star"], "reference lambda_star");
  ref.tol = j["tol"].get<double>();
  ref.x_star = detail::vector_from_json(j["x_star"], "reference x_star");
  return ref;
}

inline void save_reference(const ReferenceSolution& ref, const std::filesystem::path& path) {
  write_file(path, dump_canonical(reference_to_json(ref)));
}

inline ReferenceSolution load_reference(const std::filesystem::path& path) {
  return reference_from_json(json::parse(read_file(path)));
}

// Writes <name>_margins.csv next to the report and the report JSON itself.
inline void save_bound_report(const BoundReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::path margins_path = dir / (rep.check + "_margins.csv");
  std::string csv = "k,margin\n";
  char buf[40];
  for (std::size_t i = 0; i < rep.margins.size(); ++i) {
    csv += std::to_string(rep.k_begin + static_cast<long>(i));
    csv += ',';
    std::snprintf(buf, sizeof(buf), "%.16e", rep.margins[i]);
    csv += buf;
    csv += '\n';
  }
  write_file(margins_path, csv);

  json j;
  j["check"] = rep.check;
  j["passed"] = rep.passed;
  j["first_violation_k"] =
      rep.first_violation_k ? json(static_cast<std::int64_t>(*rep.first_violation_k)) : json();
  j["min_margin"] = rep.margins.empty() ? json() : json(rep.min_margin);
  j["margins_csv_path"] = margins_path.filename().string();
  j["skipped"] = rep.skipped;
  j["note"] = rep.note;
  write_file(dir / (rep.check + ".json"), dump_canonical(j));
}

}  // namespace ial
