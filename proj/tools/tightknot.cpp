// tightknot: command-line front end.
//
// Exit codes: 0 ok, 1 usage / invalid argument, 2 parse error,
// 3 infeasible geometry or topology failure, 4 convergence stall.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "tightknot/analysis.hpp"
#include "tightknot/batch.hpp"
#include "tightknot/invariants.hpp"
#include "tightknot/io.hpp"
#include "tightknot/records.hpp"
#include "tightknot/tightener.hpp"
#include "tightknot/topology.hpp"

namespace fs = std::filesystem;
using namespace tightknot;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParseFail = 2, kGeometryFail = 3, kStall = 4 };

struct Globals {
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "table";
  int verbosity = 0;
};

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void print(std::ostream& os, const std::vector<Table>& tables, const std::string& format) {
  bool first = true;
  for (const auto& t : tables) {
    if (!first) os << '\n';
    first = false;
    if (!t.title.empty()) os << "# " << t.title << '\n';
    if (format == "delimited") {
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << csv_cell(cells[k]);
        os << '\n';
      };
      line(t.header);
      for (const auto& r : t.rows) line(r);
      continue;
    }
    std::vector<std::size_t> width(t.header.size(), 0);
    auto grow = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size() && k < width.size(); ++k)
        width[k] = std::max(width[k], cells[k].size());
    };
    grow(t.header);
    for (const auto& r : t.rows) grow(r);
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        s += cells[k];
        if (k + 1 < cells.size()) s += std::string(width[k] - cells[k].size() + 2, ' ');
      }
      s.erase(s.find_last_not_of(' ') + 1);
      os << s << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
  }
}

void emit(const Globals& g, const std::vector<Table>& tables) {
  if (g.output.empty()) {
    print(std::cout, tables, g.format);
    return;
  }
  std::ofstream out(g.output);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + g.output);
  print(out, tables, g.format);
}

std::string num(double v) { return format_real(v); }

Table key_values(std::vector<std::pair<std::string, std::string>> kv, std::string title = {}) {
  Table t{std::move(title), {"quantity", "value"}, {}};
  for (auto& [k, v] : kv) t.rows.push_back({k, v});
  return t;
}

void add_tightening_flags(CLI::App* app, TighteningConfig& c) {
  app->add_option("--phase1-steps", c.phase1_max_steps, "phase 1 step limit")->capture_default_str();
  app->add_option("--phase1-target", c.phase1_residual_target, "phase 1 residual target")->capture_default_str();
  app->add_option("--phase2-steps", c.phase2_max_steps, "phase 2 step limit")->capture_default_str();
  app->add_option("--phase2-target", c.phase2_residual_target, "phase 2 residual target")->capture_default_str();
  app->add_option("--equilateralization", c.equilateralization_weight, "phase 1 edge-equalising weight")->capture_default_str();
  app->add_option("--step-scale", c.step_scale, "initial step, in mean edge lengths")->capture_default_str();
  app->add_option("--max-step-scale", c.max_step_scale, "largest step, in mean edge lengths")->capture_default_str();
  app->add_option("--min-step", c.min_step, "step below which the run stalls")->capture_default_str();
  app->add_option("--activation", c.contact_activation_distance, "contact activation multiple")->capture_default_str();
  app->add_option("--stall-window", c.stall_window, "steps without progress before stalling")->capture_default_str();
  app->add_option("--stall-tolerance", c.stall_tolerance, "progress threshold per window step")->capture_default_str();
  app->add_option("--trace-interval", c.trace_interval, "ropelength trace sampling")->capture_default_str();
  app->add_flag("--check-projection", c.check_projection, "verify the projection every step");
}

void add_preprocess_flags(CLI::App* app, PreprocessConfig& c) {
  app->add_option("--pre-steps", c.coulomb_steps, "preprocess steps")->capture_default_str();
  app->add_option("--coulomb", c.coulomb_strength, "repulsion strength")->capture_default_str();
  app->add_option("--tangential", c.tangential_strength, "contraction strength")->capture_default_str();
  app->add_option("--damping", c.damping, "step damping in (0, 1]")->capture_default_str();
}

CoordinateFormat coordinate_format(const std::string& s) {
  return s == "vect" ? CoordinateFormat::kVect : CoordinateFormat::kPlain;
}

// ---- measure -------------------------------------------------------------

int run_measure(const Globals& g, const std::string& path) {
  const KnotFile file = read_knot_file(path);
  const PolygonalKnot knot = file.to_knot();
  const ThicknessBreakdown t = thickness(knot);
  std::vector<std::pair<std::string, std::string>> kv = {
      {"label", file.label},
      {"components", std::to_string(knot.component_count())},
      {"vertices", std::to_string(knot.size())},
      {"length", num(length(knot))},
      {"min_rad", num(t.min_rad)},
      {"dcsd_half", num(t.dcsd_half)},
      {"thickness", num(t.thickness)},
      {"governing", t.curvature_governs ? "curvature at vertex " + std::to_string(t.curvature_vertex)
                                        : "strut between edges " + std::to_string(t.strut_edge_a) +
                                              " and " + std::to_string(t.strut_edge_b)},
  };
  if (!(t.thickness > 0.0)) throw Error(ErrorKind::kGeometry, "self-intersecting configuration");
  kv.emplace_back("ropelength", num(length(knot) / t.thickness));
  double wr = 0.0;
  double acn = 0.0;
  for (std::size_t c = 0; c < knot.component_count(); ++c) {
    const WritheAcn w = writhe_and_acn(knot.component(c));
    if (knot.component_count() > 1) {
      kv.emplace_back("component_" + std::to_string(c) + "_writhe", num(w.writhe));
      kv.emplace_back("component_" + std::to_string(c) + "_acn", num(w.acn));
    }
    wr += w.writhe;
    acn += w.acn;
  }
  kv.emplace_back("writhe", num(wr));
  kv.emplace_back("acn", num(acn));
  emit(g, {key_values(std::move(kv))});
  return kOk;
}

// ---- tighten -------------------------------------------------------------

struct TightenArgs {
  std::string input;
  std::string resume;
  std::string checkpoint;
  long checkpoint_interval = 0;
  std::string coords = "plain";
  std::string report;
  TighteningConfig config;
};

int run_tighten(const Globals& g, const TightenArgs& a) {
  PolygonalKnot knot;
  TighteningState resume_state;
  TighteningHooks hooks;
  if (!a.resume.empty()) {
    Checkpoint cp = load_checkpoint(a.resume);
    knot = std::move(cp.knot);
    resume_state = cp.state;
    hooks.resume = &resume_state;
  } else {
    if (a.input.empty()) throw Error(ErrorKind::kInvalidArgument, "an input file or --resume is required");
    knot = read_knot_file(a.input).to_knot();
  }
  if (!a.checkpoint.empty()) {
    hooks.checkpoint_interval = a.checkpoint_interval > 0 ? a.checkpoint_interval : 1000;
    hooks.on_checkpoint = [&](const PolygonalKnot& k, const TighteningState& s) {
      save_checkpoint(a.checkpoint, k, s);
      if (g.verbosity > 0)
        std::cerr << "checkpoint at step " << s.total_steps << " ropelength "
                  << num(length(k) / thickness(k).thickness) << '\n';
    };
  }
  TighteningConfig config = a.config;
  config.random_seed = g.seed;
  const TighteningResult r = tighten(knot, config, hooks);
  if (!g.output.empty()) write_knot_file(g.output, KnotFile::from_knot(r.knot), coordinate_format(a.coords));

  std::vector<std::pair<std::string, std::string>> kv = {
      {"label", r.knot.label()},
      {"vertices", std::to_string(r.knot.size())},
      {"ropelength", num(r.report.final_ropelength)},
      {"residual", num(r.report.final_residual)},
      {"rejected_steps", std::to_string(r.report.rejected_steps)},
  };
  for (std::size_t p = 0; p < 2; ++p) {
    const std::string pre = "phase" + std::to_string(p + 1) + "_";
    kv.emplace_back(pre + "steps", std::to_string(r.report.phases[p].steps));
    kv.emplace_back(pre + "termination", std::string(to_string(r.report.phases[p].reason)));
    kv.emplace_back(pre + "residual", num(r.report.phases[p].residual));
  }
  if (config.check_projection) kv.emplace_back("max_projection_violation", num(r.report.max_projection_violation));
  Table summary = key_values(std::move(kv));
  std::vector<Table> tables{summary};
  if (g.verbosity > 0) {
    Table trace{"ropelength trace", {"step", "ropelength"}, {}};
    for (const auto& t : r.report.ropelength_trace) trace.rows.push_back({std::to_string(t.step), num(t.ropelength)});
    tables.push_back(trace);
  }
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + a.report);
    print(out, tables, "delimited");
  }
  print(g.output.empty() ? std::cerr : std::cout, tables, g.format);
  return r.report.phases[1].reason == Termination::kStalled ? kStall : kOk;
}

// ---- preprocess ----------------------------------------------------------

int run_preprocess(const Globals& g, const std::string& input, const PreprocessConfig& c,
                   std::size_t resample, const std::string& coords) {
  if (g.output.empty()) throw Error(ErrorKind::kInvalidArgument, "preprocess needs --output");
  PolygonalKnot knot = read_knot_file(input).to_knot();
  if (resample > 0) knot = equilateralize(knot, resample);
  const PreprocessResult r = preprocess(knot, c);
  write_knot_file(g.output, KnotFile::from_knot(r.knot), coordinate_format(coords));
  print(std::cout,
        {key_values({{"steps", std::to_string(r.report.steps)},
                     {"capped_steps", std::to_string(r.report.capped_steps)},
                     {"starved", r.report.starved ? "yes" : "no"},
                     {"ropelength", num(ropelength(r.knot))}})},
        g.format);
  return r.report.starved ? kGeometryFail : kOk;
}

// ---- diagram -------------------------------------------------------------

int run_diagram(const Globals& g, const std::string& input, const std::vector<double>& direction) {
  const PolygonalKnot knot = read_knot_file(input).to_knot();
  std::vector<Table> tables;
  for (std::size_t c = 0; c < knot.component_count(); ++c) {
    const PolygonalKnot comp = knot.component(c);
    Diagram d;
    if (!direction.empty()) {
      if (direction.size() != 3) throw Error(ErrorKind::kInvalidArgument, "--direction takes x,y,z");
      const Point3 dir(direction[0], direction[1], direction[2]);
      if (!(dir.norm() > 0.0)) throw Error(ErrorKind::kInvalidArgument, "zero direction");
      d = project_to_diagram(comp, dir.normalized());
    } else {
      d = project_generic(comp, Point3::UnitZ(), g.seed);
    }
    const DeterminantResult det = determinant(d);
    std::ostringstream dir;
    dir << num(d.direction.x()) << ' ' << num(d.direction.y()) << ' ' << num(d.direction.z());
    tables.push_back(key_values({{"direction", dir.str()},
                                 {"crossings", std::to_string(d.crossings.size())},
                                 {"diagram_writhe", std::to_string(d.writhe())},
                                 {"determinant", det.determinant.str()},
                                 {"gauss_code", gauss_code(d)}},
                                knot.component_count() > 1 ? "component " + std::to_string(c) : ""));
  }
  emit(g, tables);
  return kOk;
}

// ---- analyze / sweep -----------------------------------------------------

bool usable(const InvariantRecord& r) {
  return (r.status.empty() || r.status == "ok") && r.ropelength.has_value();
}

std::string group_name(int c, std::optional<bool> alt) {
  return std::to_string(c) + (alt ? (*alt ? "A" : "N") : "");
}

void write_pairs(const fs::path& path, const std::vector<std::pair<double, double>>& xy) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  for (const auto& [x, y] : xy) out << num(x) << ' ' << num(y) << '\n';
}

void write_histogram(const fs::path& path, const std::vector<double>& v, std::size_t bins) {
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  if (!(hi > lo)) hi = lo + 1.0;
  const Histogram h = histogram(v, bins, lo, hi);
  std::vector<std::pair<double, double>> xy;
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    xy.emplace_back(h.lo + (static_cast<double>(k) + 0.5) * h.width, static_cast<double>(h.counts[k]));
  write_pairs(path, xy);
}

struct AnalyzeArgs {
  std::string table;
  std::string plots;
  double alt_quantum = 4.0 / 7.0;
  double nonalt_quantum = 4.0 / 3.0;
  std::size_t bins = 20;
};

int run_analyze(const Globals& g, const AnalyzeArgs& a) {
  const RecordTable all = read_record_table(a.table);
  std::vector<InvariantRecord> rows;
  for (const auto& r : all)
    if (usable(r) && r.crossing_number) rows.push_back(r);
  if (rows.empty()) throw Error(ErrorKind::kInvalidArgument, "no usable rows with crossing numbers");

  // Groups: per crossing number (population) and per crossing number and class.
  std::map<std::pair<int, int>, std::vector<const InvariantRecord*>> groups;
  for (const auto& r : rows) {
    groups[{*r.crossing_number, -1}].push_back(&r);
    if (r.alternating) groups[{*r.crossing_number, *r.alternating ? 1 : 0}].push_back(&r);
  }

  Table moments{"ropelength moments", {"group", "count", "mean", "sd", "sd_over_mean", "skewness", "kurtosis"}, {}};
  Table corr{"correlations", {"group", "pair", "pearson"}, {}};
  for (const auto& [key, list] : groups) {
    const auto alt = key.second < 0 ? std::nullopt : std::optional<bool>(key.second == 1);
    const std::string name = group_name(key.first, alt);
    std::vector<double> rope;
    for (const auto* r : list) rope.push_back(*r->ropelength);
    std::vector<std::string> line{name, std::to_string(rope.size())};
    try {
      const DistributionStats s = distribution_stats(rope);
      line.insert(line.end(), {num(s.mean), num(s.sd), num(s.sd_over_mean), num(s.skewness), num(s.kurtosis)});
    } catch (const Error&) {
      line.insert(line.end(), {num(rope.front()), "", "", "", ""});
    }
    moments.rows.push_back(line);

    auto correlate = [&](const std::string& pair, auto fx, auto fy) {
      std::vector<double> x, y;
      for (const auto* r : list) {
        const auto vx = fx(*r);
        const auto vy = fy(*r);
        if (vx && vy) {
          x.push_back(*vx);
          y.push_back(*vy);
        }
      }
      if (x.size() < 3) return;
      try {
        corr.rows.push_back({name, pair, num(pearson(x, y))});
      } catch (const Error&) {
      }
    };
    auto rope_f = [](const InvariantRecord& r) { return r.ropelength; };
    auto abs_wr = [](const InvariantRecord& r) {
      return r.writhe ? std::optional<double>(std::abs(*r.writhe)) : std::nullopt;
    };
    correlate("ropelength~acn", rope_f, [](const InvariantRecord& r) { return r.acn; });
    correlate("ropelength~hyperbolic_volume", rope_f, [](const InvariantRecord& r) { return r.hyperbolic_volume; });
    correlate("writhe~rasmussen_s", [](const InvariantRecord& r) { return r.writhe; },
              [](const InvariantRecord& r) { return r.rasmussen_s; });
    correlate("writhe~tau", [](const InvariantRecord& r) { return r.writhe; },
              [](const InvariantRecord& r) { return r.tau; });
    correlate("|writhe|~acn", abs_wr, [](const InvariantRecord& r) { return r.acn; });
  }

  Table fits{"scaling fits on group means", {"sample", "model", "coefficient", "coefficient_error", "second", "second_error", "rss"}, {}};
  auto fit_sample = [&](const std::string& name, int cls) {
    std::vector<ScalingPoint> pts;
    for (const auto& r : rows) {
      if (cls >= 0 && (!r.alternating || (*r.alternating ? 1 : 0) != cls)) continue;
      pts.push_back({static_cast<double>(*r.crossing_number), *r.ropelength});
    }
    const auto means = group_means(pts);
    if (means.size() < 3) return;
    for (FitModel m : {FitModel::kLinear, FitModel::kPower}) {
      const FitResult f = fit_scaling(means, m);
      fits.rows.push_back({name, std::string(to_string(m)), num(f.coefficient), num(f.coefficient_error),
                           num(f.second), num(f.second_error), num(f.rss)});
    }
  };
  fit_sample("all", -1);
  fit_sample("alternating", 1);
  fit_sample("non-alternating", 0);

  Table resid{"residual writhe (absolute writhe, in quanta)", {"class", "quantum", "offset", "count", "sd", "uniform_null_sd"}, {}};
  std::map<int, std::vector<double>> residuals;
  for (const auto& r : rows) {
    if (!r.alternating || !r.writhe) continue;
    const bool alt = *r.alternating;
    const double q = alt ? a.alt_quantum : a.nonalt_quantum;
    residuals[alt ? 1 : 0].push_back(residual_writhe(std::abs(*r.writhe), q, !alt) / q);
  }
  for (const auto& [cls, v] : residuals) {
    std::string sd;
    try {
      sd = num(distribution_stats(v).sd);
    } catch (const Error&) {
    }
    resid.rows.push_back({cls ? "alternating" : "non-alternating", num(cls ? a.alt_quantum : a.nonalt_quantum),
                          cls ? "integer" : "half-integer", std::to_string(v.size()), sd, num(uniform_null_sd())});
  }

  if (!a.plots.empty()) {
    const fs::path dir(a.plots);
    fs::create_directories(dir);
    std::vector<std::pair<double, double>> scaling;
    for (const auto& r : rows) scaling.emplace_back(*r.crossing_number, *r.ropelength);
    write_pairs(dir / "ropelength_vs_crossings.dat", scaling);
    for (const auto& [key, list] : groups) {
      const auto alt = key.second < 0 ? std::nullopt : std::optional<bool>(key.second == 1);
      const std::string name = group_name(key.first, alt);
      std::vector<double> rope;
      std::vector<std::pair<double, double>> ra;
      for (const auto* r : list) {
        rope.push_back(*r->ropelength);
        if (r->acn) ra.emplace_back(*r->acn, *r->ropelength);
      }
      write_histogram(dir / ("ropelength_hist_" + name + ".dat"), rope, a.bins);
      if (!ra.empty()) write_pairs(dir / ("ropelength_vs_acn_" + name + ".dat"), ra);
    }
    for (const auto& [cls, v] : residuals)
      if (!v.empty())
        write_histogram(dir / (std::string("residual_writhe_hist_") + (cls ? "A" : "N") + ".dat"), v, a.bins);
  }

  emit(g, {moments, corr, fits, resid});
  return kOk;
}

struct SweepArgs {
  std::string input;
  std::string cls = "all";
  int crossings = 0;
  bool is_signed = false;
  SweepOptions options;
};

int run_sweep(const Globals& g, SweepArgs a) {
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorKind::kParse, "cannot read " + a.input);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<double> w;
  const auto rows = parse_delimited(text);
  bool tabular = false;
  if (!rows.empty())
    for (const auto& cell : rows[0])
      if (cell == "label" || cell == "writhe") tabular = true;
  if (tabular) {
    for (const auto& r : parse_record_table(text)) {
      if (!usable(r) || !r.writhe) continue;
      if (a.crossings > 0 && r.crossing_number != a.crossings) continue;
      if (a.cls != "all") {
        if (!r.alternating || *r.alternating != (a.cls == "alt")) continue;
      }
      w.push_back(*r.writhe);
    }
  } else {
    std::istringstream s(text);
    std::string tok;
    while (s >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(s, rest);
        continue;
      }
      w.push_back(parse_real(tok));
    }
  }
  if (!a.is_signed)
    for (auto& v : w) v = std::abs(v);
  const QuantizationResult q = quantization_sweep(w, a.options);
  std::vector<double> dev;
  for (double v : w) dev.push_back(centred_fraction(v / q.A + q.B));
  std::string sd;
  try {
    sd = num(distribution_stats(dev).sd);
  } catch (const Error&) {
    sd = "0";
  }
  emit(g, {key_values({{"values", std::to_string(w.size())},
                       {"A", num(q.A)},
                       {"B", num(q.B)},
                       {"variance", num(q.variance)},
                       {"residual_sd", sd},
                       {"uniform_null_sd", num(uniform_null_sd())},
                       {"a_resolution", num(q.a_resolution)},
                       {"b_resolution", num(q.b_resolution)}})});
  return kOk;
}

// ---- batch ---------------------------------------------------------------

int run_batch(const Globals& g, const std::string& manifest_path, BatchConfig config, bool fresh) {
  if (g.output.empty()) throw Error(ErrorKind::kInvalidArgument, "batch needs --output");
  const auto manifest = read_manifest(manifest_path);
  config.tightening.random_seed = g.seed;
  config.topology_seed = g.seed;

  BatchOptions options;
  const fs::path out(g.output);
  if (!fresh && fs::exists(out)) options.previous = read_record_table(out);

  // Completed rows go straight to disk so an interrupted run can resume.
  std::ofstream partial(out, fresh || !fs::exists(out) ? std::ios::trunc : std::ios::app);
  if (!partial) throw Error(ErrorKind::kInvalidArgument, "cannot write " + out.string());
  if (fresh || options.previous.empty()) {
    partial << record_table_header();
    partial.flush();
  }
  options.on_row = [&](const InvariantRecord& r) {
    partial << record_row(r);
    partial.flush();
    if (g.verbosity > 0)
      std::cerr << r.label << ": " << (r.status == "error" ? r.error : r.status) << '\n';
  };
  BatchSummary summary;
  const RecordTable table = batch_run(manifest, config, options, &summary);
  partial.close();
  write_record_table_file(out, table);
  print(std::cout,
        {key_values({{"rows", std::to_string(table.size())},
                     {"computed", std::to_string(summary.computed)},
                     {"reused", std::to_string(summary.reused)},
                     {"failed", std::to_string(summary.failed)}})},
        g.format);
  return kOk;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kParse: return kParseFail;
    case ErrorKind::kGeometry:
    case ErrorKind::kTopology: return kGeometryFail;
    case ErrorKind::kConvergence: return kStall;
    case ErrorKind::kInvalidArgument: return kUsage;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal knot invariants, tightening and ideal-knot statistics"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for projection directions")->capture_default_str();
  app.add_option("-o,--output", g.output, "output path");
  app.add_option("--format", g.format, "table or delimited")
      ->check(CLI::IsMember({"table", "delimited"}))
      ->capture_default_str();
  app.add_flag("-v,--verbose", g.verbosity, "more output (repeatable)");

  std::string input;
  auto* measure = app.add_subcommand("measure", "length, thickness, ropelength, writhe and ACN of a knot file");
  measure->add_option("file", input, "coordinate file")->required()->check(CLI::ExistingFile);

  TightenArgs ta;
  auto* tighten_cmd = app.add_subcommand("tighten", "tighten one knot; -o writes the result");
  tighten_cmd->add_option("file", ta.input, "coordinate file")->check(CLI::ExistingFile);
  tighten_cmd->add_option("--resume", ta.resume, "continue from a checkpoint");
  tighten_cmd->add_option("--checkpoint", ta.checkpoint, "checkpoint path (sidecar <path>.state)");
  tighten_cmd->add_option("--checkpoint-interval", ta.checkpoint_interval, "steps between checkpoints");
  tighten_cmd->add_option("--coords", ta.coords, "output coordinate format")->check(CLI::IsMember({"plain", "vect"}));
  tighten_cmd->add_option("--report", ta.report, "write the report as delimited text");
  add_tightening_flags(tighten_cmd, ta.config);

  PreprocessConfig pc;
  std::size_t resample = 0;
  std::string coords = "plain";
  auto* pre = app.add_subcommand("preprocess", "Coulomb repulsion with tangential contraction");
  pre->add_option("file", input, "coordinate file")->required()->check(CLI::ExistingFile);
  pre->add_option("--resample", resample, "equal-chord resample to N vertices per component first");
  pre->add_option("--coords", coords, "output coordinate format")->check(CLI::IsMember({"plain", "vect"}));
  add_preprocess_flags(pre, pc);

  std::vector<double> direction;
  auto* diagram = app.add_subcommand("diagram", "Gauss code and determinant from a projection");
  diagram->add_option("file", input, "coordinate file")->required()->check(CLI::ExistingFile);
  diagram->add_option("--direction", direction, "projection direction x,y,z")->delimiter(',');

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "moments, correlations, fits and residual writhe of a record table");
  analyze->add_option("table", aa.table, "record table")->required()->check(CLI::ExistingFile);
  analyze->add_option("--plots", aa.plots, "directory for plot-ready data files");
  analyze->add_option("--alt-quantum", aa.alt_quantum, "writhe quantum for alternating knots")->capture_default_str();
  analyze->add_option("--nonalt-quantum", aa.nonalt_quantum, "writhe quantum for non-alternating knots")->capture_default_str();
  analyze->add_option("--bins", aa.bins, "histogram bins")->capture_default_str();

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "writhe quantization sweep over (A, B)");
  sweep->add_option("input", sa.input, "record table or whitespace-separated writhes")->required()->check(CLI::ExistingFile);
  sweep->add_option("--class", sa.cls, "all, alt or nonalt")->check(CLI::IsMember({"all", "alt", "nonalt"}));
  sweep->add_option("--crossings", sa.crossings, "restrict to one crossing number");
  sweep->add_flag("--signed", sa.is_signed, "keep writhe signs (default: absolute values)");
  sweep->add_option("--a-min", sa.options.a_min)->capture_default_str();
  sweep->add_option("--a-max", sa.options.a_max)->capture_default_str();
  sweep->add_option("--a-res", sa.options.a_resolution)->capture_default_str();
  sweep->add_option("--b-res", sa.options.b_resolution)->capture_default_str();
  sweep->add_option("--threads", sa.options.threads)->capture_default_str();

  auto* generate = app.add_subcommand("generate", "write a generated configuration");
  generate->require_subcommand(1);
  std::string spec_path, builtin = "trefoil";
  std::size_t samples = 96;
  auto* fourier = generate->add_subcommand("fourier", "sample a Fourier knot");
  fourier->add_option("--spec", spec_path, "coefficient file")->check(CLI::ExistingFile);
  fourier->add_option("--builtin", builtin, "trefoil or figure-eight")
      ->check(CLI::IsMember({"trefoil", "figure-eight"}))
      ->capture_default_str();
  fourier->add_option("-n,--vertices", samples, "vertex count")->capture_default_str();
  fourier->add_option("--coords", coords)->check(CLI::IsMember({"plain", "vect"}));
  std::size_t links = 6, per_link = 20;
  auto* hopf = generate->add_subcommand("hopf-chain", "closed necklace of linked rings");
  hopf->add_option("--links", links)->capture_default_str();
  hopf->add_option("--vertices", per_link, "vertices per ring")->capture_default_str();
  hopf->add_option("--coords", coords)->check(CLI::IsMember({"plain", "vect"}));

  BatchConfig bc;
  std::string manifest;
  bool fresh = false;
  auto* batch = app.add_subcommand("batch", "tighten and measure every knot of a manifest");
  batch->add_option("manifest", manifest, "manifest (path,label,crossing_number,alternating,...)")
      ->required()
      ->check(CLI::ExistingFile);
  batch->add_option("--threads", bc.threads)->capture_default_str();
  batch->add_option("--resample", bc.resample, "vertices per component before tightening");
  batch->add_flag("--preprocess", bc.preprocess, "run the preprocessor first");
  batch->add_flag("--fresh", fresh, "ignore rows already in the output");
  add_tightening_flags(batch, bc.tightening);
  add_preprocess_flags(batch, bc.preprocessing);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  for (auto* sub : generate->get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*measure) return run_measure(g, input);
    if (*tighten_cmd) return run_tighten(g, ta);
    if (*pre) return run_preprocess(g, input, pc, resample, coords);
    if (*diagram) return run_diagram(g, input, direction);
    if (*analyze) return run_analyze(g, aa);
    if (*sweep) return run_sweep(g, sa);
    if (*batch) return run_batch(g, manifest, bc, fresh);
    if (*fourier) {
      if (g.output.empty()) throw Error(ErrorKind::kInvalidArgument, "generate needs --output");
      FourierKnotSpec spec;
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        std::stringstream s;
        s << in.rdbuf();
        spec = parse_fourier_spec(s.str());
      } else {
        spec = builtin == "trefoil" ? trefoil_spec() : figure_eight_spec();
      }
      write_knot_file(g.output, KnotFile::from_knot(sample_fourier(spec, samples)), coordinate_format(coords));
      return kOk;
    }
    if (*hopf) {
      if (g.output.empty()) throw Error(ErrorKind::kInvalidArgument, "generate needs --output");
      write_knot_file(g.output, make_hopf_chain(links, per_link), coordinate_format(coords));
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
