// Copyright 2026 The hlaser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hlaser/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "hlaser/analytics.hpp"
#include "hlaser/error.hpp"
#include "hlaser/kernels.hpp"
#include "hlaser/observables.hpp"
#include "hlaser/parallel.hpp"
#include "hlaser/verify.hpp"

namespace hlaser::cli {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (header.empty()) {
      header = f;
      continue;
    }
    std::map<std::string, std::string> r;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) r[header[i]] = f[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void fill_row(ResultRow& row, bool with_mandel_q) {
  BandLiouvillian liou = build_liouvillian(row.params, 1);
  if (with_mandel_q) {
    BeamObservables o = observe(liou);
    row.flux = o.flux;
    row.coherence = o.coherence;
    row.linewidth = o.linewidth;
    row.mandel_q = o.mandel_q;
    row.solver_residual = o.solver_residual;
    return;
  }
  row.flux = liou.flux;
  row.coherence = coherence(liou);
  row.linewidth = 4.0 * row.flux / row.coherence;
  auto r = liou.block(0).apply(liou.rho_ss);
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  row.solver_residual = m / liou.block(0).max_abs();
}

}  // namespace

ResultRow compute_row(const ModelParams& params, bool with_mandel_q, bool timing) {
  ResultRow row;
  row.params = params;
  row.mu = params.mu();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fill_row(row, with_mandel_q);
  } catch (const Error& e) {
    row.error = e.what();
  }
  if (timing)
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

namespace {

struct Common {
  std::string family = "p";
  double p = 4.1479;
  double lambda = 0.0;
  double q = 0.0;
  int dim = 100;
  std::vector<int> dims;
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string isa = "auto";
};

ModelParams params_from(const Common& c, int dim) {
  ModelParams m;
  m.family = parse_family(c.family);
  m.p = c.p;
  m.lambda = c.lambda;
  m.q = c.q;
  m.dim = dim;
  m.validate();
  return m;
}

json params_json(const ModelParams& m) {
  return json{{"family", family_name(m.family)}, {"p", m.p},     {"lambda", m.lambda},
              {"q", m.q},                        {"dim", m.dim}, {"mu", m.mu()}};
}

json fit_json(const PowerLawFit& f) {
  json s = json::array();
  for (const auto& [x, y] : f.samples) s.push_back({x, y});
  return json{{"c", f.c},
              {"w", f.w},
              {"stderr_w", f.stderr_w},
              {"runs_p_value", f.runs_p_value},
              {"samples", s}};
}

// Output goes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) raise(ErrorKind::InvalidParams, "cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

bool color_enabled() { return std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO); }

void report_error(std::ostream& out, std::ostream& err, const std::string& kind,
                  const std::string& message) {
  json doc{{"schema_version", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
  out << doc.dump(2) << "\n";
  if (color_enabled())
    err << "\033[31merror:\033[0m " << message << "\n";
  else
    err << "error: " << message << "\n";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParams:
    case ErrorKind::InconsistentInputs:
    case ErrorKind::DimensionTooLarge:
    case ErrorKind::GammaTooLarge:
    case ErrorKind::OutOfDomain:
    case ErrorKind::InsufficientSamples: return kUsage;
    default: return kSolver;
  }
}

const std::vector<std::string> kOutputs{"flux", "coherence", "linewidth", "mandel_q", "w_fit"};

std::vector<std::string> row_columns(const std::set<std::string>& outputs) {
  std::vector<std::string> cols{"family", "p", "lambda", "q", "D", "mu"};
  for (const auto& o : kOutputs)
    if (o != "w_fit" && outputs.count(o)) cols.push_back(o);
  for (const char* c : {"wall_time_s", "solver_residual", "error"}) cols.emplace_back(c);
  return cols;
}

std::string row_csv(const ResultRow& r, const std::vector<std::string>& cols) {
  std::string line;
  const bool ok = r.error.empty();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::string& c = cols[i];
    std::string v;
    if (c == "family") v = family_name(r.params.family);
    else if (c == "p") v = format_number(r.params.p);
    else if (c == "lambda") v = format_number(r.params.lambda);
    else if (c == "q") v = format_number(r.params.q);
    else if (c == "D") v = std::to_string(r.params.dim);
    else if (c == "mu") v = format_number(r.mu);
    else if (c == "wall_time_s") v = format_number(r.wall_time_s);
    else if (c == "error") v = csv_field(r.error);
    else if (ok && c == "flux") v = format_number(r.flux);
    else if (ok && c == "coherence") v = format_number(r.coherence);
    else if (ok && c == "linewidth") v = format_number(r.linewidth);
    else if (ok && c == "mandel_q") v = format_number(r.mandel_q);
    else if (ok && c == "solver_residual") v = format_number(r.solver_residual);
    line += (i ? "," : "") + v;
  }
  return line;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// ---------------------------------------------------------------- observe

int cmd_observe(const Common& c, std::ostream& out) {
  const ModelParams m = params_from(c, c.dim);
  ResultRow row;
  row.params = m;
  row.mu = m.mu();
  const auto t0 = std::chrono::steady_clock::now();
  fill_row(row, true);
  if (c.format != "csv")
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Sink sink(c.out, out);
  if (c.format == "csv") {
    // Timing is left at zero so the row is reproducible.
    auto cols = row_columns({"flux", "coherence", "linewidth", "mandel_q"});
    *sink << join(cols) << "\n" << row_csv(row, cols) << "\n";
    return kOk;
  }
  json doc{{"schema_version", kSchemaVersion}, {"command", "observe"}, {"params", params_json(m)}};
  doc["observables"] = {{"flux", row.flux},
                        {"coherence", row.coherence},
                        {"linewidth", row.linewidth},
                        {"mandel_q", row.mandel_q},
                        {"solver_residual", row.solver_residual}};
  doc["heisenberg_regime"] = m.heisenberg_regime();
  if (m.p > 3.0 && m.dim >= 10) {
    const double pred = coherence_formula(m);
    doc["prediction"] = {{"coherence", pred},
                         {"relative_difference", (row.coherence - pred) / pred}};
  } else {
    doc["prediction"] = nullptr;
    doc["note"] = "asymptotic-formula not applicable (needs p > 3 and D >= 10)";
  }
  doc["isa"] = kernels::isa_name(kernels::active_isa());
  doc["wall_time_s"] = row.wall_time_s;
  *sink << doc.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  std::vector<double> p_grid, lambda_grid, q_grid;
  std::vector<std::string> outputs{"flux", "coherence", "linewidth", "mandel_q"};
  std::string journal;
  bool resume = false;
  std::string gnuplot;
  bool no_timing = false;
};

int cmd_sweep(const Common& c, const SweepFlags& s, std::ostream& out, std::ostream& err) {
  std::set<std::string> outputs;
  for (const auto& o : s.outputs) {
    if (std::find(kOutputs.begin(), kOutputs.end(), o) == kOutputs.end())
      raise(ErrorKind::InvalidParams, "unknown output '" + o + "'");
    outputs.insert(o);
  }
  if (outputs.empty()) raise(ErrorKind::InvalidParams, "sweep needs at least one output");
  if (outputs.count("w_fit")) outputs.insert("coherence");

  const Family fam = parse_family(c.family);
  const std::vector<double> pg = s.p_grid.empty() ? std::vector<double>{c.p} : s.p_grid;
  std::vector<double> xg{0.0};
  if (fam == Family::PLambda) xg = s.lambda_grid.empty() ? std::vector<double>{c.lambda} : s.lambda_grid;
  if (fam == Family::PQ) xg = s.q_grid.empty() ? std::vector<double>{c.q} : s.q_grid;
  const std::vector<int> dg = c.dims.empty() ? std::vector<int>{c.dim} : c.dims;

  std::vector<ModelParams> points;
  for (double p : pg)
    for (double x : xg)
      for (int d : dg) {
        ModelParams m;
        m.family = fam;
        m.p = p;
        if (fam == Family::PLambda) m.lambda = x;
        if (fam == Family::PQ) m.q = x;
        m.dim = d;
        m.validate();
        points.push_back(m);
      }
  err << "sweep: " << points.size() << " grid points\n";

  const auto cols = row_columns(outputs);
  const std::string journal_tag = "# hlaser-journal " + join(cols);
  std::map<std::size_t, std::string> done;
  if (s.resume && !s.journal.empty()) {
    std::ifstream jin(s.journal);
    std::string line;
    if (jin && std::getline(jin, line)) {
      if (line != journal_tag) raise(ErrorKind::InconsistentInputs, "journal columns do not match");
      while (std::getline(jin, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const std::size_t idx = std::stoul(line.substr(0, comma));
        if (idx < points.size()) done[idx] = line.substr(comma + 1);
      }
    }
  }
  std::ofstream jout;
  if (!s.journal.empty()) {
    const bool fresh = !(s.resume && !done.empty());
    jout.open(s.journal, fresh ? std::ios::trunc : std::ios::app);
    if (!jout) raise(ErrorKind::InvalidParams, "cannot open journal " + s.journal);
    if (fresh) jout << journal_tag << "\n" << std::flush;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!done.count(i)) todo.push_back(i);
  std::vector<ResultRow> rows(points.size());
  std::vector<std::string> lines(points.size());
  for (const auto& [i, l] : done) lines[i] = l;
  std::mutex writer;
  parallel_for(todo.size(), resolve_workers(c.workers), [&](std::size_t k) {
    const std::size_t i = todo[k];
    rows[i] = compute_row(points[i], outputs.count("mandel_q") > 0, !s.no_timing);
    std::string l = row_csv(rows[i], cols);
    std::lock_guard<std::mutex> lock(writer);
    lines[i] = std::move(l);
    if (jout.is_open()) jout << i << "," << lines[i] << "\n" << std::flush;
  });

  // Parse everything back so journal rows and fresh rows are treated alike.
  std::string text = join(cols) + "\n";
  for (const auto& l : lines) text += l + "\n";
  const auto recs = parse_csv(text);
  int failures = 0;
  for (const auto& r : recs)
    if (!r.at("error").empty()) ++failures;

  json fits = json::array();
  if (outputs.count("w_fit")) {
    std::map<std::tuple<double, double, double>, std::vector<std::pair<double, double>>> groups;
    for (const auto& r : recs) {
      if (!r.at("error").empty()) continue;
      groups[{std::stod(r.at("p")), std::stod(r.at("lambda")), std::stod(r.at("q"))}].emplace_back(
          std::stod(r.at("mu")), std::stod(r.at("coherence")));
    }
    for (const auto& [key, samples] : groups) {
      json f{{"p", std::get<0>(key)}, {"lambda", std::get<1>(key)}, {"q", std::get<2>(key)}};
      try {
        f["fit"] = fit_json(fit_power_law(samples));
      } catch (const Error& e) {
        f["fit"] = nullptr;
        f["note"] = e.what();
      }
      fits.push_back(f);
    }
  }

  Sink sink(c.out, out);
  if (c.format == "json") {
    json doc{{"schema_version", kSchemaVersion}, {"command", "sweep"}, {"columns", cols}};
    json jr = json::array();
    for (const auto& r : recs) {
      json o;
      for (const auto& col : cols) {
        const std::string& v = r.at(col);
        if (col == "family" || col == "error") o[col] = v;
        else if (col == "D") o[col] = std::stoi(v);
        else o[col] = v.empty() ? json(nullptr) : json(std::stod(v));
      }
      jr.push_back(o);
    }
    doc["rows"] = jr;
    doc["fits"] = fits;
    doc["failures"] = failures;
    *sink << doc.dump(2) << "\n";
  } else {
    *sink << text;
    for (const auto& f : fits) err << "w_fit: " << f.dump() << "\n";
  }

  if (!s.gnuplot.empty()) {
    std::ofstream g(s.gnuplot);
    const std::string data = c.out.empty() ? "sweep.csv" : c.out;
    g << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set logscale xy\n"
      << "set xlabel 'D'\n"
      << "set ylabel 'coherence'\n"
      << "plot '" << data << "' using 'D':'coherence' with linespoints\n";
  }
  return failures ? kSolver : kOk;
}

// ---------------------------------------------------------------- traces

struct TraceFlags {
  std::vector<double> times;
  double tmax = 0.0;
  int points = 101;
  std::vector<double> tuple;
};

std::vector<double> trace_times(const TraceFlags& t, double default_tmax) {
  if (!t.times.empty()) return t.times;
  const double tmax = t.tmax > 0.0 ? t.tmax : default_tmax;
  if (t.points < 2) raise(ErrorKind::InvalidParams, "--points must be >= 2");
  std::vector<double> v(t.points);
  for (int i = 0; i < t.points; ++i) v[i] = tmax * i / (t.points - 1);
  return v;
}

void write_trace(const Common& c, std::ostream& out, const std::string& kind,
                 const ModelParams& m, const std::vector<double>& times,
                 const std::vector<double>& values, const std::vector<double>& ideal) {
  Sink sink(c.out, out);
  if (c.format == "json") {
    json doc{{"schema_version", kSchemaVersion}, {"command", "trace"}, {"kind", kind},
             {"params", params_json(m)},         {"times", times},     {"values", values},
             {"ideal", ideal}};
    *sink << doc.dump(2) << "\n";
    return;
  }
  *sink << "s," << kind << "," << kind << "_ideal\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    *sink << format_number(times[i]) << "," << format_number(values[i]) << ","
          << format_number(ideal[i]) << "\n";
}

int cmd_trace_g1(const Common& c, const TraceFlags& t, std::ostream& out) {
  const ModelParams m = params_from(c, c.dim);
  BandLiouvillian liou = build_liouvillian(m, 1);
  const double coh = coherence(liou);
  const IdealBeam ideal{liou.flux, 4.0 * liou.flux / coh};
  const auto times = trace_times(t, 10.0 / ideal.linewidth);
  CorrelationTrace tr = g1_trace(liou, times);
  std::vector<double> id;
  for (double s : times) id.push_back(ideal_g1(ideal, s));
  write_trace(c, out, "g1", m, times, tr.values, id);
  return kOk;
}

int cmd_trace_g2(const Common& c, const TraceFlags& t, std::ostream& out) {
  const ModelParams m = params_from(c, c.dim);
  BandLiouvillian liou = build_liouvillian(m, 2);
  const double coh = coherence(liou);
  const IdealBeam ideal{liou.flux, 4.0 * liou.flux / coh};
  if (!t.tuple.empty()) {
    if (t.tuple.size() != 4) raise(ErrorKind::InvalidParams, "--tuple takes s,s',t',t");
    const double v = g2_general(liou, t.tuple[0], t.tuple[1], t.tuple[2], t.tuple[3]);
    const double vi = ideal_g2(ideal, t.tuple[0], t.tuple[1], t.tuple[2], t.tuple[3]);
    Sink sink(c.out, out);
    json doc{{"schema_version", kSchemaVersion}, {"command", "trace-g2"}, {"params", params_json(m)},
             {"tuple", t.tuple},                 {"g2", v},                {"g2_ideal", vi}};
    *sink << doc.dump(2) << "\n";
    return kOk;
  }
  const auto times = trace_times(t, static_cast<double>(m.dim) * m.dim);
  CorrelationTrace tr = g2ps_trace(liou, times);
  std::vector<double> id(times.size(), 1.0);
  write_trace(c, out, "g2ps", m, times, tr.values, id);
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyFlags {
  bool corrupt = false;
  std::vector<double> q_list;
  int dmin = 50, dmax = 250, dstep = 50;
  std::vector<std::string> families{"plambda", "pq"};
  std::string window = "optimal";
  int n_starts = 8;
  std::vector<double> p_grid{1, 2, 3, 4, 5};
};

int emit(const Common& c, std::ostream& out, json doc, bool passed) {
  doc["passed"] = passed;
  Sink sink(c.out, out);
  *sink << doc.dump(2) << "\n";
  return passed ? kOk : kVerifyFailed;
}

int cmd_verify_oracle(const Common& c, const VerifyFlags& v, std::ostream& out) {
  OracleReport r = oracle_equivalence(c.seed, v.corrupt);
  json doc{{"schema_version", kSchemaVersion}, {"command", "verify oracle"}, {"seed", c.seed},
           {"draws", r.draws},                 {"tolerance", r.tolerance},     {"max_deviation", r.max_deviation}};
  if (!r.passed) {
    const auto& f = r.first_failure;
    doc["first_failure"] = {{"draw", f.draw},
                            {"quantity", f.quantity},
                            {"params", params_json(f.params)},
                            {"band", f.band},
                            {"dense", f.dense}};
  }
  return emit(c, out, doc, r.passed);
}

int cmd_verify_sspq(const Common& c, const VerifyFlags& v, std::ostream& out) {
  const std::vector<int> dims = c.dims.empty() ? std::vector<int>{100, 200, 400} : c.dims;
  const std::vector<double> qs = v.q_list.empty() ? std::vector<double>{c.q} : v.q_list;
  json rows = json::array();
  bool ok = true;
  for (double q : qs) {
    SsPqReport r = verify_ss_pq(c.p, q, dims);
    ok = ok && r.passed;
    rows.push_back({{"q", q},
                    {"dims", r.dims},
                    {"liouvillian_norm", r.liouvillian_norm},
                    {"roundoff_floor", r.floor},
                    {"residual_is_roundoff", r.residual_is_roundoff},
                    {"w_liouvillian", std::isfinite(r.w_liouvillian) ? json(r.w_liouvillian) : json(nullptr)},
                    {"w_loss", r.w_loss},
                    {"w_gain_map", r.w_gain_map},
                    {"w_top", r.w_top},
                    {"passed", r.passed}});
  }
  json doc{{"schema_version", kSchemaVersion}, {"command", "verify ss-pq"}, {"p", c.p},
           {"threshold", -1.5},                {"results", rows}};
  return emit(c, out, doc, ok);
}

int cmd_verify_cond4(const Common& c, const VerifyFlags& v, std::ostream& out) {
  std::vector<int> dims = c.dims;
  if (dims.empty())
    for (int d = v.dmin; d <= v.dmax; d += v.dstep) dims.push_back(d);
  Condition4Options o;
  o.workers = resolve_workers(c.workers);
  o.seed = c.seed;
  o.n_starts = v.n_starts;
  o.window = parse_window(v.window);
  json results = json::array();
  bool ok = true;
  for (const auto& fam : v.families) {
    std::vector<ModelParams> models;
    for (int d : dims) {
      Common cc = c;
      cc.family = fam;
      if (fam == "plambda") cc.lambda = 0.5;
      if (fam == "pq") cc.q = -1.0;
      models.push_back(params_from(cc, d));
    }
    DeviationReport rep = condition4_g2(models, o);
    rep.g1 = condition4_g1(models, o);
    bool g1_decreasing = true;
    for (std::size_t i = 1; i < rep.g1.size(); ++i)
      g1_decreasing = g1_decreasing && rep.g1[i].max < rep.g1[i - 1].max;
    const bool w_ok = std::abs(rep.fit_g2.w + 0.5) <= 0.1;
    const bool c_ok = rep.fit_g2.c >= 0.9 && rep.fit_g2.c <= 1.7;
    ok = ok && w_ok && c_ok && g1_decreasing;
    json g1 = json::array(), g2 = json::array();
    for (const auto& d : rep.g1)
      g1.push_back({{"dim", d.dim}, {"max", d.max}, {"argmax", d.argmax}, {"linewidth", d.linewidth}});
    for (const auto& d : rep.g2)
      g2.push_back({{"dim", d.dim},
                    {"coherence", d.coherence},
                    {"tau", d.tau},
                    {"max", d.max},
                    {"argmax", d.argmax},
                    {"best_probe", d.best_probe}});
    results.push_back({{"family", fam},
                       {"delta_g1", g1},
                       {"delta_g2", g2},
                       {"fit_g2", fit_json(rep.fit_g2)},
                       {"prefactor_fixed_half", rep.prefactor_half},
                       {"g1_decreasing", g1_decreasing},
                       {"exponent_ok", w_ok},
                       {"prefactor_ok", c_ok}});
  }
  json doc{{"schema_version", kSchemaVersion},
           {"command", "verify cond4"},
           {"window", v.window},
           {"seed", c.seed},
           {"tolerances", {{"exponent", -0.5}, {"exponent_tol", 0.1}, {"prefactor_range", {0.9, 1.7}}}},
           {"results", results}};
  return emit(c, out, doc, ok);
}

int cmd_verify_regime(const Common& c, const VerifyFlags& v, std::ostream& out) {
  const std::vector<int> dims =
      c.dims.empty() ? std::vector<int>{50, 71, 100, 141, 200, 283} : c.dims;
  const ModelParams base = params_from(c, dims.front());
  auto rows = regime_scan(base, v.p_grid, dims, resolve_workers(c.workers));
  json jr = json::array();
  bool ok = true;
  for (const auto& r : rows) {
    const double guide = std::min(r.p + 1.0, 4.0);
    const bool within = std::abs(r.fit.w - guide) <= 0.3;
    ok = ok && within;
    jr.push_back({{"p", r.p},
                  {"w", r.fit.w},
                  {"stderr_w", r.fit.stderr_w},
                  {"guide", guide},
                  {"regime", regime_name(r.regime)},
                  {"within_tolerance", within}});
  }
  json doc{{"schema_version", kSchemaVersion}, {"command", "verify regime"},
           {"family", c.family},              {"dims", dims},
           {"tolerance", 0.3},                {"rows", jr}};
  return emit(c, out, doc, ok);
}

// ---------------------------------------------------------------- predict / fit

int cmd_predict(const Common& c, bool optimal_only, std::ostream& out) {
  Sink sink(c.out, out);
  const double popt = optimal_p();
  if (optimal_only) {
    json doc{{"schema_version", kSchemaVersion}, {"command", "predict optimal-p"}, {"optimal_p", popt},
             {"prefactor", coherence_prefactor(popt)}};
    *sink << doc.dump(2) << "\n";
    return kOk;
  }
  const ModelParams m = params_from(c, c.dim);
  const double coh = coherence_formula(m);
  json doc{{"schema_version", kSchemaVersion},
           {"command", "predict"},
           {"params", params_json(m)},
           {"prefactor", coherence_prefactor(m.p)},
           {"divisor", family_divisor(m)},
           {"coherence", coh},
           {"optimal_p", popt},
           {"heisenberg_bound", heisenberg_bound(m.mu())}};
  *sink << doc.dump(2) << "\n";
  return kOk;
}

struct FitFlags {
  std::string input;
  std::string x = "mu";
  std::string y = "coherence";
  double xmin = 0.0;
  double xmax = 1e300;
};

int cmd_fit(const Common& c, const FitFlags& f, std::ostream& out) {
  std::ifstream in(f.input);
  if (!in) raise(ErrorKind::InvalidParams, "cannot read " + f.input);
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<std::pair<double, double>> samples;
  for (const auto& r : parse_csv(ss.str())) {
    auto xi = r.find(f.x), yi = r.find(f.y);
    if (xi == r.end() || yi == r.end())
      raise(ErrorKind::InvalidParams, "columns '" + f.x + "'/'" + f.y + "' not found");
    auto e = r.find("error");
    if (e != r.end() && !e->second.empty()) continue;
    samples.emplace_back(std::stod(xi->second), std::stod(yi->second));
  }
  PowerLawFit fit = fit_power_law(samples, f.xmin, f.xmax);
  Sink sink(c.out, out);
  json doc{{"schema_version", kSchemaVersion}, {"command", "fit"}, {"x", f.x}, {"y", f.y},
           {"fit", fit_json(fit)}};
  *sink << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Band-resolved laser coherence and photon statistics", "hlaser"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file mirroring the flags (flags override)");

  Common c;
  app.add_option("--family", c.family, "p | plambda | pq")
      ->check(CLI::IsMember({"p", "plambda", "pq"}));
  app.add_option("--p", c.p, "distribution sharpness");
  app.add_option("--lambda", c.lambda, "gain/loss split (plambda)");
  app.add_option("--q", c.q, "pump Mandel-Q (pq)");
  app.add_option("--dim", c.dim, "cavity dimension D");
  app.add_option("--dims", c.dims, "list of D")->delimiter(',');
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", c.seed);
  app.add_option("--workers", c.workers, "worker threads (WORKERS env overrides)");
  app.add_option("--isa", c.isa, "auto | scalar | avx2 | neon")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

  auto* observe_cmd = app.add_subcommand("observe", "steady-state observables for one model");

  SweepFlags sf;
  auto* sweep_cmd = app.add_subcommand("sweep", "observables over a parameter grid");
  sweep_cmd->add_option("--p-grid", sf.p_grid)->delimiter(',');
  sweep_cmd->add_option("--lambda-grid", sf.lambda_grid)->delimiter(',');
  sweep_cmd->add_option("--q-grid", sf.q_grid)->delimiter(',');
  sweep_cmd->add_option("--outputs", sf.outputs, "flux,coherence,linewidth,mandel_q,w_fit")
      ->delimiter(',');
  sweep_cmd->add_option("--journal", sf.journal, "per-row completion journal");
  sweep_cmd->add_flag("--resume", sf.resume, "skip rows already in the journal");
  sweep_cmd->add_option("--gnuplot", sf.gnuplot, "write a companion gnuplot script");
  sweep_cmd->add_flag("--no-timing", sf.no_timing, "write wall_time_s = 0");

  TraceFlags tf;
  auto* g1_cmd = app.add_subcommand("trace-g1", "g1(s) against the phase-diffusion form");
  auto* g2_cmd = app.add_subcommand("trace-g2", "g2 pairwise trace or one general tuple");
  for (auto* sc : {g1_cmd, g2_cmd}) {
    sc->add_option("--times", tf.times)->delimiter(',');
    sc->add_option("--tmax", tf.tmax);
    sc->add_option("--points", tf.points);
  }
  g2_cmd->add_option("--tuple", tf.tuple, "s,s',t',t")->delimiter(',');

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "verification suites");
  verify_cmd->require_subcommand(1);
  auto* v_oracle = verify_cmd->add_subcommand("oracle", "band route against the dense oracle");
  v_oracle->add_flag("--corrupt", vf.corrupt, "perturb one band entry (harness self-test)");
  auto* v_sspq = verify_cmd->add_subcommand("ss-pq", "pq steady-state residual scaling");
  v_sspq->add_option("--q-list", vf.q_list)->delimiter(',');
  auto* v_cond4 = verify_cmd->add_subcommand("cond4", "condition-4 deviation scans");
  v_cond4->add_option("--dmin", vf.dmin);
  v_cond4->add_option("--dmax", vf.dmax);
  v_cond4->add_option("--dstep", vf.dstep);
  v_cond4->add_option("--families", vf.families)->delimiter(',');
  v_cond4->add_option("--window", vf.window, "optimal | full")
      ->check(CLI::IsMember({"optimal", "full"}));
  v_cond4->add_option("--n-starts", vf.n_starts);
  auto* v_regime = verify_cmd->add_subcommand("regime", "power-law regime scan over p");
  v_regime->add_option("--p-grid", vf.p_grid)->delimiter(',');

  auto* predict_cmd = app.add_subcommand("predict", "closed-form predictions");
  auto* predict_opt = predict_cmd->add_subcommand("optimal-p", "maximiser of the prefactor");

  FitFlags ff;
  auto* fit_cmd = app.add_subcommand("fit", "power-law fit of two CSV columns");
  fit_cmd->add_option("--in", ff.input)->required();
  fit_cmd->add_option("--x", ff.x);
  fit_cmd->add_option("--y", ff.y);
  fit_cmd->add_option("--xmin", ff.xmin);
  fit_cmd->add_option("--xmax", ff.xmax);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (c.isa != "auto") {
      using kernels::Isa;
      kernels::set_isa(c.isa == "scalar" ? Isa::Scalar : c.isa == "avx2" ? Isa::Avx2 : Isa::Neon);
    }
    if (observe_cmd->parsed()) {
      if (c.format.empty()) c.format = "json";
      return cmd_observe(c, out);
    }
    if (sweep_cmd->parsed()) {
      if (c.format.empty()) c.format = "csv";
      return cmd_sweep(c, sf, out, err);
    }
    if (g1_cmd->parsed()) {
      if (c.format.empty()) c.format = "csv";
      return cmd_trace_g1(c, tf, out);
    }
    if (g2_cmd->parsed()) {
      if (c.format.empty()) c.format = "csv";
      return cmd_trace_g2(c, tf, out);
    }
    if (v_oracle->parsed()) return cmd_verify_oracle(c, vf, out);
    if (v_sspq->parsed()) {
      if (app.count("--p") == 0) c.p = 3.0;
      return cmd_verify_sspq(c, vf, out);
    }
    if (v_cond4->parsed()) return cmd_verify_cond4(c, vf, out);
    if (v_regime->parsed()) return cmd_verify_regime(c, vf, out);
    if (predict_cmd->parsed()) return cmd_predict(c, predict_opt->parsed(), out);
    if (fit_cmd->parsed()) return cmd_fit(c, ff, out);
  } catch (const Error& e) {
    report_error(out, err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error(out, err, "Internal", e.what());
    return kSolver;
  }
  return kUsage;
}

}  // namespace hlaser::cli
