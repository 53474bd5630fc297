// Command-line front end: vep, vnrp, wick, diagrams, oracle, sweep.
// Config is an INI file with [section] blocks; unknown sections or keys are
// rejected. Exit codes: 0 success, 2 configuration error, 3 numeric failure
// (non-convergence where convergence was required, or an oracle comparison
// above tolerance).

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "udw/feynman.hpp"
#include "udw/oracle.hpp"
#include "udw/response.hpp"
#include "udw/wordgen.hpp"

using json = nlohmann::json;
using namespace udw;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// INI config.

struct Config {
  // section -> key -> value, plus file order of sections for reporting
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& sec) const { return sections.count(sec) > 0; }
  bool has(const std::string& sec, const std::string& key) const {
    auto it = sections.find(sec);
    return it != sections.end() && it->second.count(key) > 0;
  }
  std::string str(const std::string& sec, const std::string& key,
                  const std::string& dflt) const {
    auto it = sections.find(sec);
    if (it == sections.end()) return dflt;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? dflt : jt->second;
  }
  std::string str(const std::string& sec, const std::string& key) const {
    if (!has(sec, key))
      throw ConfigError("missing required key '" + key + "' in [" + sec + "]");
    return sections.at(sec).at(key);
  }
  double num(const std::string& sec, const std::string& key) const {
    return to_num(sec, key, str(sec, key));
  }
  double num(const std::string& sec, const std::string& key,
             double dflt) const {
    if (!has(sec, key)) return dflt;
    return to_num(sec, key, sections.at(sec).at(key));
  }
  int integer(const std::string& sec, const std::string& key, int dflt) const {
    if (!has(sec, key)) return dflt;
    const double v = num(sec, key);
    if (v != static_cast<double>(static_cast<int>(v)))
      throw ConfigError("key '" + key + "' in [" + sec + "] must be integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& sec, const std::string& key, bool dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string v = sections.at(sec).at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "' in [" + sec + "] must be boolean");
  }

 private:
  static double to_num(const std::string& sec, const std::string& key,
                       const std::string& v) {
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in [" + sec +
                        "]: not a number: '" + v + "'");
    }
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty() || cfg.has(section))
        throw ConfigError("line " + std::to_string(lineno) +
                          ": bad or duplicate section '" + section + "'");
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value' inside a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (cfg.sections[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "' in [" + section + "]");
    cfg.sections[section][key] = val;
  }
  return cfg;
}

using Schema = std::map<std::string, std::set<std::string>>;

void validate_keys(const Config& cfg, const Schema& allowed) {
  for (const auto& [sec, kv] : cfg.sections) {
    auto it = allowed.find(sec);
    if (it == allowed.end())
      throw ConfigError("unknown section [" + sec + "]");
    for (const auto& [key, _] : kv)
      if (!it->second.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + sec + "]");
  }
}

const Schema kFieldSchema = {{"field", {"kind", "n", "L", "m"}}};
const Schema kDetectorSchema = {
    {"detector", {"model", "omega", "lambda"}},
    {"switching", {"kind", "T", "t0"}},
    {"profile", {"kind", "sigma", "x0"}}};
const Schema kOutputSchema = {{"output", {"path", "format"}}};

Schema merge(std::initializer_list<Schema> parts) {
  Schema out;
  for (const auto& p : parts)
    for (const auto& [sec, keys] : p) out[sec].insert(keys.begin(), keys.end());
  return out;
}

// --------------------------------------------------------------------------
// Physics objects from config sections.

CavityField build_field(const Config& cfg) {
  const std::string kind = cfg.str("field", "kind", "real");
  FieldKind fk;
  if (kind == "real")
    fk = FieldKind::RealScalar;
  else if (kind == "complex")
    fk = FieldKind::ComplexScalar;
  else if (kind == "spinor")
    fk = FieldKind::Spinor;
  else
    throw ConfigError("field kind must be real|complex|spinor, got '" + kind +
                      "'");
  CavityField f;
  f.kind = fk;
  f.n = cfg.integer("field", "n", 1);
  f.L = cfg.num("field", "L", 1.0);
  f.m = cfg.num("field", "m", 0.0);
  if (f.n < 1 || f.n > 3) throw ConfigError("field n must be 1..3");
  if (f.L <= 0.0) throw ConfigError("field L must be > 0");
  if (f.m < 0.0) throw ConfigError("field m must be >= 0");
  return f;
}

DVec parse_pos(const std::string& s) {
  DVec x;
  std::istringstream in(s);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) throw ConfigError("x0 takes at most 3 components");
    x[i++] = std::stod(part);
  }
  return x;
}

Switching build_switching(const Config& cfg) {
  const std::string kind = cfg.str("switching", "kind", "sudden");
  const double T = cfg.num("switching", "T", 1.0);
  if (kind == "sudden") {
    if (cfg.has("switching", "t0"))
      return Switching::sudden(T, cfg.num("switching", "t0"));
    return Switching::sudden(T);
  }
  if (kind == "gaussian") {
    if (cfg.has("switching", "t0"))
      throw ConfigError("t0 applies to sudden switching only");
    return Switching::gaussian(T);
  }
  throw ConfigError("switching kind must be sudden|gaussian, got '" + kind +
                    "'");
}

SpatialProfile build_profile(const Config& cfg) {
  const std::string kind = cfg.str("profile", "kind", "point");
  DVec x0;
  if (cfg.has("profile", "x0")) x0 = parse_pos(cfg.str("profile", "x0"));
  if (kind == "point") {
    if (cfg.has("profile", "sigma"))
      throw ConfigError("sigma applies to gaussian profile only");
    return SpatialProfile::point(x0);
  }
  if (kind == "gaussian")
    return SpatialProfile::gaussian(cfg.num("profile", "sigma"), x0);
  throw ConfigError("profile kind must be point|gaussian, got '" + kind + "'");
}

DetectorSpec build_detector(const Config& cfg, const CavityField& f) {
  DetectorSpec det;
  det.model = cfg.integer("detector", "model", 1);
  det.Omega = cfg.num("detector", "omega", 1.0);
  det.lambda = cfg.num("detector", "lambda", 1.0);
  det.switching = build_switching(cfg);
  det.profile = build_profile(cfg);
  try {
    det.validate(f);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return det;
}

std::vector<int> build_schedule(const Config& cfg, const std::string& sec) {
  if (cfg.has(sec, "schedule")) {
    if (cfg.has(sec, "cutoff"))
      throw ConfigError("give either cutoff or schedule, not both");
    std::vector<int> sched;
    std::istringstream in(cfg.str(sec, "schedule"));
    std::string part;
    while (std::getline(in, part, ',')) sched.push_back(std::stoi(trim(part)));
    if (sched.size() < 4)
      throw ConfigError("schedule needs at least 4 increasing cutoffs");
    return sched;
  }
  return cutoff_schedule(cfg.integer(sec, "cutoff", 16));
}

// --------------------------------------------------------------------------
// Output.

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json extra = json::object();  // summary fields, json output only

  void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

void write_table(const Table& t, const std::string& out_path,
                 const std::string& format, const std::string& command) {
  std::ostringstream os;
  if (format == "csv") {
    for (size_t i = 0; i < t.columns.size(); ++i)
      os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& r : t.rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
  } else if (format == "json") {
    json doc;
    doc["command"] = command;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& r : t.rows) {
      json obj;
      for (size_t i = 0; i < r.size() && i < t.columns.size(); ++i)
        obj[t.columns[i]] = r[i];
      rows.push_back(obj);
    }
    doc["rows"] = rows;
    for (auto it = t.extra.begin(); it != t.extra.end(); ++it)
      doc[it.key()] = it.value();
    os << doc.dump(2) << "\n";
  } else {
    throw ConfigError("format must be csv|json, got '" + format + "'");
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file: " + out_path);
    f << os.str();
  }
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  int threads = 0;     // 0: from config
  double tol = -1.0;   // <0: from config
};

std::string output_path(const CommonFlags& fl, const Config& cfg) {
  if (!fl.out_path.empty()) return fl.out_path;
  return cfg.str("output", "path", "");
}
std::string output_format(const CommonFlags& fl, const Config& cfg) {
  if (!fl.format.empty()) return fl.format;
  return cfg.str("output", "format", "csv");
}
int run_threads(const CommonFlags& fl, const Config& cfg,
                const std::string& sec) {
  const int t = fl.threads > 0 ? fl.threads : cfg.integer(sec, "threads", 1);
  if (t < 1) throw ConfigError("threads must be >= 1");
  return t;
}
double run_tol(const CommonFlags& fl, const Config& cfg,
               const std::string& sec, double dflt) {
  const double t = fl.tol >= 0.0 ? fl.tol : cfg.num(sec, "tol", dflt);
  if (t <= 0.0) throw ConfigError("tol must be > 0");
  return t;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --------------------------------------------------------------------------
// vep

PartialSumSeries run_vep_series(const CavityField& f, const DetectorSpec& det,
                                const std::string& term,
                                const std::vector<int>& sched, double tol,
                                int threads) {
  if (term == "renormalized") return vep_renormalized(f, det, sched, tol, threads);
  if (term == "linear") return vep_linear(f, det, sched, tol, threads);
  if (term == "pair") return vep_pair(f, det, sched, tol, threads);
  if (term == "tadpole") return vep_tadpole(f, det, sched, tol);
  throw ConfigError("term must be renormalized|linear|pair|tadpole, got '" +
                    term + "'");
}

int cmd_vep(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  validate_keys(cfg, merge({kFieldSchema, kDetectorSchema, kOutputSchema,
                            {{"run",
                              {"cutoff", "schedule", "tol", "threads", "term",
                               "require_converged"}}}}));
  const CavityField f = build_field(cfg);
  const DetectorSpec det = build_detector(cfg, f);
  const auto sched = build_schedule(cfg, "run");
  const double tol = run_tol(fl, cfg, "run", 1e-4);
  const int threads = run_threads(fl, cfg, "run");
  const std::string term = cfg.str("run", "term", "renormalized");

  const auto t0 = std::chrono::steady_clock::now();
  PartialSumSeries s;
  try {
    s = run_vep_series(f, det, term, sched, tol, threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double wall = elapsed_s(t0);

  Table t;
  t.columns = {"cutoff", "partial_sum", "tail_bound", "verdict", "wall_time_s"};
  const std::string verdict = to_string(s.diagnosis.verdict);
  for (size_t j = 0; j < s.cutoffs.size(); ++j)
    t.row({std::to_string(s.cutoffs[j]), fmt17(s.values[j]),
           fmt17(s.tail_bounds[j]), verdict, fmt17(wall)});
  t.extra["verdict"] = verdict;
  t.extra["value"] = fmt17(s.diagnosis.value);
  t.extra["tail_bound"] = fmt17(s.diagnosis.tail_bound);
  t.extra["slope"] = fmt17(s.diagnosis.slope);
  write_table(t, output_path(fl, cfg), output_format(fl, cfg), "vep");

  if (cfg.flag("run", "require_converged", false) &&
      s.diagnosis.verdict != Verdict::Converged)
    throw NumericFailure("mode sum did not converge (verdict: " + verdict + ")");
  return 0;
}

// --------------------------------------------------------------------------
// vnrp

int cmd_vnrp(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  validate_keys(cfg, merge({kFieldSchema, kDetectorSchema, kOutputSchema,
                            {{"run",
                              {"cutoff", "tol", "threads", "nodes",
                               "max_nodes"}}}}));
  const CavityField f = build_field(cfg);
  const DetectorSpec det = build_detector(cfg, f);
  const int cutoff = cfg.integer("run", "cutoff", 4);
  QuadSpec q;
  q.nodes = cfg.integer("run", "nodes", q.nodes);
  q.max_nodes = cfg.integer("run", "max_nodes", q.max_nodes);
  q.tol = run_tol(fl, cfg, "run", q.tol);

  const auto t0 = std::chrono::steady_clock::now();
  const double p = vnrp_second_order(f, det, cutoff, q);
  const double resid = unitarity_residual(f, det, cutoff, q);
  const double wall = elapsed_s(t0);

  Table t;
  t.columns = {"cutoff", "p_ground", "unitarity_residual", "wall_time_s"};
  t.row({std::to_string(cutoff), fmt17(p), fmt17(resid), fmt17(wall)});
  write_table(t, output_path(fl, cfg), output_format(fl, cfg), "vnrp");
  return 0;
}

// --------------------------------------------------------------------------
// wick

WickContext context_from(const Config& cfg, const CavityField& f, int cutoff,
                         double gap) {
  WickContext ctx;
  ctx.field = f;
  ctx.cutoff = cutoff;
  ctx.gaps = {gap};
  if (cfg.has("profile")) ctx.profiles = {build_profile(cfg)};
  return ctx;
}

int cmd_wick(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  validate_keys(cfg, merge({kFieldSchema, kOutputSchema,
                            {{"profile", {"kind", "sigma", "x0"}},
                             {"run", {"word", "cutoff", "gap", "oracle_check",
                                      "tol"}}}}));
  const CavityField f = build_field(cfg);
  const int cutoff = cfg.integer("run", "cutoff", 4);
  const WickContext ctx =
      context_from(cfg, f, cutoff, cfg.num("run", "gap", 1.0));

  OperatorWord w;
  try {
    w = parse_word(cfg.str("run", "word"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const auto t0 = std::chrono::steady_clock::now();
  const VevResult r = evaluate_vev(w, ctx);
  const double wall = elapsed_s(t0);

  Table t;
  t.columns = {"word", "n_pairings", "value_re", "value_im", "wall_time_s"};
  std::string shown = format_word(w);
  if (output_format(fl, cfg) == "csv")
    for (auto& c : shown)
      if (c == ',') c = ';';
  t.row({shown, std::to_string(r.n_pairings), fmt17(r.value.real()),
         fmt17(r.value.imag()), fmt17(wall)});

  if (cfg.flag("run", "oracle_check", false)) {
    TruncatedSpace sp(f, mode_list(f.n, cutoff), required_cap(w, f), 1);
    const cplx brute = word_vev(sp, ctx, w);
    const double diff = std::abs(brute - r.value);
    t.columns.push_back("oracle_diff");
    t.rows[0].push_back(fmt17(diff));
    if (diff > run_tol(fl, cfg, "run", 1e-10))
      throw NumericFailure("contraction engine disagrees with direct evaluation");
  }
  write_table(t, output_path(fl, cfg), output_format(fl, cfg), "wick");
  return 0;
}

// --------------------------------------------------------------------------
// diagrams

int cmd_diagrams(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  validate_keys(cfg, merge({kFieldSchema, kDetectorSchema, kOutputSchema,
                            {{"run",
                              {"order", "cutoff", "quanta", "excited"}}}}));
  const CavityField f = build_field(cfg);
  const DetectorSpec det = build_detector(cfg, f);
  WickContext ctx;
  ctx.field = f;
  ctx.cutoff = cfg.integer("run", "cutoff", 4);
  ctx.gaps = {det.Omega};
  ctx.profiles = {det.profile};

  ExternalState out;
  out.detector_excited = {cfg.flag("run", "excited", false)};
  if (cfg.has("run", "quanta")) {
    OperatorWord qw;
    try {
      qw = parse_word(cfg.str("run", "quanta") + " | T[ ] |");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    for (const auto& s : qw.prefix) {
      if ((s.kind != SymKind::LadderA && s.kind != SymKind::LadderB) ||
          s.dagger)
        throw ConfigError(
            "quanta must be annihilator tokens like a{1} or b{-1;+}");
      out.quanta.push_back({s.kind == SymKind::LadderB, s.l, s.s2});
    }
  }

  std::vector<Diagram> ds;
  try {
    ds = enumerate_diagrams(ctx, det.model, cfg.integer("run", "order", 2), out);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Table t;
  t.columns = {"index", "order", "symmetry_factor", "sign", "graph"};
  for (size_t i = 0; i < ds.size(); ++i) {
    std::string g = diagram_text(ds[i], ctx);
    for (auto& c : g) {
      if (c == '\n') c = ';';
      if (c == ',') c = ' ';
    }
    t.row({std::to_string(i), std::to_string(ds[i].order),
           std::to_string(ds[i].symmetry_factor), std::to_string(ds[i].sign),
           g});
  }
  t.extra["count"] = ds.size();
  write_table(t, output_path(fl, cfg), output_format(fl, cfg), "diagrams");
  return 0;
}

// --------------------------------------------------------------------------
// oracle

int cmd_oracle(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  const std::string mode = cfg.str("run", "mode", "compare");

  if (mode == "compare") {
    validate_keys(cfg,
                  merge({kFieldSchema, kOutputSchema,
                         {{"run", {"mode", "count", "seed", "cutoff",
                                   "max_symbols", "gap", "tol", "word"}}}}));
    const CavityField f = build_field(cfg);
    const int cutoff = cfg.integer("run", "cutoff", 1);
    const double tol = run_tol(fl, cfg, "run", 1e-10);
    WickContext ctx;
    ctx.field = f;
    ctx.cutoff = cutoff;
    ctx.gaps = {cfg.num("run", "gap", 1.0)};

    std::vector<OperatorWord> words;
    if (cfg.has("run", "word")) {
      try {
        words.push_back(parse_word(cfg.str("run", "word")));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else {
      RandomWordGenerator gen(f, cutoff,
                              static_cast<unsigned>(cfg.integer("run", "seed", 1)),
                              cfg.integer("run", "max_symbols", 8));
      const int count = cfg.integer("run", "count", 50);
      for (int i = 0; i < count; ++i) words.push_back(gen.next());
    }

    Table t;
    t.columns = {"index",     "word",      "wick_re", "wick_im",
                 "oracle_re", "oracle_im", "abs_diff", "pass"};
    size_t failures = 0;
    const bool csv = output_format(fl, cfg) == "csv";
    for (size_t i = 0; i < words.size(); ++i) {
      const OperatorWord& w = words[i];
      const cplx wick = evaluate_vev(w, ctx).value;
      TruncatedSpace sp(f, mode_list(f.n, cutoff), required_cap(w, f), 1);
      const cplx brute = word_vev(sp, ctx, w);
      const double diff = std::abs(wick - brute);
      const double scale = std::max(1.0, std::abs(brute));
      const bool pass = diff <= tol * scale;
      if (!pass) ++failures;
      std::string shown = format_word(w);
      if (csv)
        for (auto& c : shown)
          if (c == ',') c = ';';
      t.row({std::to_string(i), shown, fmt17(wick.real()), fmt17(wick.imag()),
             fmt17(brute.real()), fmt17(brute.imag()), fmt17(diff),
             pass ? "yes" : "no"});
    }
    t.extra["failures"] = failures;
    t.extra["total"] = words.size();
    write_table(t, output_path(fl, cfg), output_format(fl, cfg), "oracle");
    if (failures > 0)
      throw NumericFailure(std::to_string(failures) + " of " +
                           std::to_string(words.size()) +
                           " words exceed tolerance");
    return 0;
  }

  if (mode == "evolve") {
    validate_keys(cfg,
                  merge({kFieldSchema, kDetectorSchema, kOutputSchema,
                         {{"run", {"mode", "cutoff", "cap", "t_begin", "t_end",
                                   "steps"}}}}));
    const CavityField f = build_field(cfg);
    const DetectorSpec det = build_detector(cfg, f);
    const int cutoff = cfg.integer("run", "cutoff", 1);
    const int cap = cfg.integer("run", "cap", 2);
    const auto [lo, hi] = det.switching.support();
    const double t_begin = cfg.num("run", "t_begin", lo);
    const double t_end = cfg.num("run", "t_end", hi);
    const int steps = cfg.integer("run", "steps", 400);
    if (steps < 1) throw ConfigError("steps must be >= 1");

    TruncatedSpace sp(f, mode_list(f.n, cutoff), cap, 1);
    WickContext ctx;
    ctx.field = f;
    ctx.cutoff = cutoff;
    ctx.gaps = {det.Omega};
    ctx.profiles = {det.profile};

    const auto t0 = std::chrono::steady_clock::now();
    const EvolveResult r = oracle_evolve(sp, ctx, det, t_begin, t_end, steps);
    const double wall = elapsed_s(t0);

    Table t;
    t.columns = {"dim", "steps", "p_excited", "norm_defect", "wall_time_s"};
    t.row({std::to_string(sp.dim), std::to_string(steps), fmt17(r.p_excited),
           fmt17(r.norm_defect), fmt17(wall)});
    write_table(t, output_path(fl, cfg), output_format(fl, cfg), "oracle");
    return 0;
  }

  throw ConfigError("oracle mode must be compare|evolve, got '" + mode + "'");
}

// --------------------------------------------------------------------------
// sweep

struct SweepPoint {
  double value = 0.0;
  double p = 0.0;
  std::string verdict;
  double wall = 0.0;
};

void apply_axis(CavityField& f, DetectorSpec& det, const std::string& axis,
                double v) {
  if (axis == "T") {
    det.switching = (det.switching.kind == Switching::Kind::Sudden)
                        ? Switching::sudden(v)
                        : Switching::gaussian(v);
  } else if (axis == "sigma") {
    det.profile = SpatialProfile::gaussian(v, det.profile.x0);
  } else if (axis == "omega") {
    det.Omega = v;
  } else if (axis == "lambda") {
    det.lambda = v;
  } else if (axis == "L") {
    f.L = v;
  } else if (axis == "m") {
    f.m = v;
  } else {
    throw ConfigError("sweep axis must be T|sigma|omega|lambda|L|m, got '" +
                      axis + "'");
  }
}

int cmd_sweep(const CommonFlags& fl) {
  Config cfg = load_config(fl.config_path);
  validate_keys(cfg,
                merge({kFieldSchema, kDetectorSchema, kOutputSchema,
                       {{"run", {"cutoff", "schedule", "tol", "threads",
                                 "term"}},
                        {"sweep", {"axis", "from", "to", "points", "scale"}}}}));
  const CavityField base_f = build_field(cfg);
  const DetectorSpec base_det = build_detector(cfg, base_f);
  const auto sched = build_schedule(cfg, "run");
  const double tol = run_tol(fl, cfg, "run", 1e-4);
  const int threads = run_threads(fl, cfg, "run");
  const std::string term = cfg.str("run", "term", "renormalized");

  const std::string axis = cfg.str("sweep", "axis");
  const double from = cfg.num("sweep", "from");
  const double to = cfg.num("sweep", "to");
  const int points = cfg.integer("sweep", "points", 5);
  const std::string scale = cfg.str("sweep", "scale", "linear");
  if (points < 2) throw ConfigError("sweep needs at least 2 points");
  if (scale != "linear" && scale != "log")
    throw ConfigError("sweep scale must be linear|log");
  if (scale == "log" && (from <= 0.0 || to <= 0.0))
    throw ConfigError("log scale needs positive endpoints");

  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / (points - 1);
    grid[i] = (scale == "linear")
                  ? from + u * (to - from)
                  : from * std::pow(to / from, u);
  }
  {
    // Validate the axis against the base configuration up front.
    CavityField f = base_f;
    DetectorSpec det = base_det;
    apply_axis(f, det, axis, grid[0]);
  }

  // Worker pool over sweep points; each point is a full deterministic
  // re-summation, so assembly order does not affect values.
  std::vector<SweepPoint> result(points);
  std::atomic<int> next{0};
  std::string error;
  std::mutex err_mtx;
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= points) return;
      try {
        CavityField f = base_f;
        DetectorSpec det = base_det;
        apply_axis(f, det, axis, grid[i]);
        const auto t0 = std::chrono::steady_clock::now();
        const PartialSumSeries s = run_vep_series(f, det, term, sched, tol, 1);
        result[i] = {grid[i], s.diagnosis.value,
                     to_string(s.diagnosis.verdict), elapsed_s(t0)};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mtx);
        if (error.empty()) error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min(threads, points); ++w)
    pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (!error.empty()) throw ConfigError(error);

  Table t;
  t.columns = {"axis", "value", "probability", "verdict", "wall_time_s"};
  bool increasing = true, decreasing = true;
  for (int i = 0; i < points; ++i) {
    const auto& r = result[i];
    t.row({axis, fmt17(r.value), fmt17(r.p), r.verdict, fmt17(r.wall)});
    if (i > 0) {
      if (result[i].p < result[i - 1].p) increasing = false;
      if (result[i].p > result[i - 1].p) decreasing = false;
    }
  }
  t.extra["monotone"] = increasing   ? "increasing"
                        : decreasing ? "decreasing"
                                     : "none";
  write_table(t, output_path(fl, cfg), output_format(fl, cfg), "sweep");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity detector response calculator"};
  app.require_subcommand(1);

  CommonFlags fl;
  struct Sub {
    const char* name;
    const char* desc;
    int (*run)(const CommonFlags&);
  };
  const Sub subs[] = {
      {"vep", "vacuum excitation probability over a cutoff schedule", cmd_vep},
      {"vnrp", "vacuum no-response probability and unitarity check", cmd_vnrp},
      {"wick", "evaluate one operator word by contractions", cmd_wick},
      {"diagrams", "enumerate second-order diagrams", cmd_diagrams},
      {"oracle", "brute-force comparison or direct evolution", cmd_oracle},
      {"sweep", "parameter sweep of the excitation probability", cmd_sweep},
  };
  std::map<std::string, int (*)(const CommonFlags&)> dispatch;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.desc);
    sc->add_option("--config", fl.config_path, "config file (INI)")
        ->required();
    sc->add_option("--out", fl.out_path, "output path (default stdout)");
    sc->add_option("--format", fl.format, "csv|json");
    sc->add_option("--threads", fl.threads, "worker threads");
    sc->add_option("--tol", fl.tol, "tolerance override");
    dispatch[s.name] = s.run;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    return dispatch[app.get_subcommands().front()->get_name()](fl);
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
