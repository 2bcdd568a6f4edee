#include <fstream>
#include <map>
#include <sstream>

#include "tightknot/io.hpp"
#include "tightknot/tightener.hpp"

namespace tightknot {

namespace {

std::filesystem::path state_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".state";
  return p;
}

long parse_long(const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw Error(ErrorKind::kParse, "bad integer '" + text + "'");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const PolygonalKnot& knot,
                     const TighteningState& state) {
  write_knot_file(path, KnotFile::from_knot(knot));
  std::ostringstream s;
  const TighteningReport& r = state.report;
  s << "phase = " << state.phase << '\n'
    << "step_in_phase = " << state.step_in_phase << '\n'
    << "total_steps = " << state.total_steps << '\n'
    << "step = " << format_real(state.step) << '\n'
    << "stall_count = " << state.stall_count << '\n'
    << "rejected_steps = " << r.rejected_steps << '\n'
    << "final_residual = " << format_real(r.final_residual) << '\n'
    << "final_ropelength = " << format_real(r.final_ropelength) << '\n'
    << "max_projection_violation = " << format_real(r.max_projection_violation) << '\n';
  for (std::size_t p = 0; p < r.phases.size(); ++p) {
    s << "phase" << p + 1 << "_steps = " << r.phases[p].steps << '\n'
      << "phase" << p + 1 << "_reason = " << to_string(r.phases[p].reason) << '\n'
      << "phase" << p + 1 << "_residual = " << format_real(r.phases[p].residual) << '\n';
  }
  s << "trace =";
  for (const auto& t : r.ropelength_trace) s << ' ' << t.step << ':' << format_real(t.ropelength);
  s << '\n';

  const auto sp = state_path(path);
  std::ofstream out(sp);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + sp.string());
  out << s.str();
  if (!out) throw Error(ErrorKind::kInvalidArgument, "write failed for " + sp.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Checkpoint cp{read_knot_file(path).to_knot(), {}};
  const auto sp = state_path(path);
  std::ifstream in(sp);
  if (!in) throw Error(ErrorKind::kParse, "cannot read " + sp.string());

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, sp.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::kParse, sp.string() + ": missing key '" + key + "'");
    return it->second;
  };

  TighteningState& st = cp.state;
  TighteningReport& r = st.report;
  st.phase = static_cast<int>(parse_long(get("phase")));
  if (st.phase < 0 || st.phase > 2) throw Error(ErrorKind::kParse, "phase out of range");
  st.step_in_phase = parse_long(get("step_in_phase"));
  st.total_steps = parse_long(get("total_steps"));
  st.step = parse_real(get("step"));
  st.stall_count = parse_long(get("stall_count"));
  r.rejected_steps = parse_long(get("rejected_steps"));
  r.final_residual = parse_real(get("final_residual"));
  r.final_ropelength = parse_real(get("final_ropelength"));
  r.max_projection_violation = parse_real(get("max_projection_violation"));
  for (std::size_t p = 0; p < r.phases.size(); ++p) {
    const std::string prefix = "phase" + std::to_string(p + 1) + "_";
    r.phases[p].steps = parse_long(get(prefix + "steps"));
    r.phases[p].reason = termination_from_string(get(prefix + "reason"));
    r.phases[p].residual = parse_real(get(prefix + "residual"));
  }
  std::istringstream trace(get("trace"));
  std::string item;
  while (trace >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::kParse, "bad trace entry '" + item + "'");
    r.ropelength_trace.push_back({parse_long(item.substr(0, colon)), parse_real(item.substr(colon + 1))});
  }
  return cp;
}

}  // namespace tightknot
