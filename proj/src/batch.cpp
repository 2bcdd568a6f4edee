#include "tightknot/batch.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tightknot/invariants.hpp"
#include "tightknot/io.hpp"
#include "tightknot/topology.hpp"

namespace tightknot {

std::string BatchConfig::hash() const {
  std::ostringstream s;
  s << tightening.hash() << ' ' << preprocess;
  if (preprocess) {
    s << ' ' << preprocessing.coulomb_steps << ' ' << format_real(preprocessing.coulomb_strength)
      << ' ' << format_real(preprocessing.tangential_strength) << ' '
      << format_real(preprocessing.damping);
  }
  s << ' ' << resample << ' ' << topology_seed;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string determinants(const PolygonalKnot& knot, std::uint64_t seed) {
  std::string out;
  for (std::size_t c = 0; c < knot.component_count(); ++c) {
    if (c) out += '/';
    out += knot_determinant(knot.component(c), seed).determinant.str();
  }
  return out;
}

std::string_view kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kGeometry: return "geometry";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kTopology: return "topology";
  }
  return "error";
}

}  // namespace

InvariantRecord process_entry(const ManifestEntry& entry, const BatchConfig& config) {
  InvariantRecord r = entry.metadata;
  r.config_hash = config.hash();

  PolygonalKnot input = read_knot_file(entry.path).to_knot();
  input.set_label(r.label);
  PolygonalKnot knot = input;
  if (config.resample > 0) knot = equilateralize(knot, config.resample);
  if (config.preprocess) knot = preprocess(knot, config.preprocessing).knot;

  const TighteningResult t = tighten(knot, config.tightening);
  r.determinant_before = determinants(input, config.topology_seed);
  r.determinant_after = determinants(t.knot, config.topology_seed);

  double wr = 0.0;
  double acn = 0.0;
  for (std::size_t c = 0; c < t.knot.component_count(); ++c) {
    const WritheAcn w = writhe_and_acn(t.knot.component(c));
    wr += w.writhe;
    acn += w.acn;
  }
  r.vertex_count = static_cast<long>(t.knot.size());
  r.ropelength = t.report.final_ropelength;
  r.writhe = wr;
  r.acn = acn;
  r.residual = t.report.final_residual;
  r.termination = std::string(to_string(t.report.phases[0].reason)) + "/" +
                  std::string(to_string(t.report.phases[1].reason));
  r.status = r.determinant_before == r.determinant_after ? "ok" : "topology-changed";
  r.error.clear();
  return r;
}

RecordTable batch_run(const std::vector<ManifestEntry>& manifest, const BatchConfig& config,
                      const BatchOptions& options, BatchSummary* summary) {
  config.tightening.validate();
  if (config.preprocess) config.preprocessing.validate();
  const std::string hash = config.hash();

  std::map<std::string, const InvariantRecord*> cached;
  for (const auto& r : options.previous)
    if (r.config_hash == hash) cached[r.label] = &r;

  RecordTable rows(manifest.size());
  std::vector<std::size_t> todo;
  BatchSummary s;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto it = cached.find(manifest[i].metadata.label);
    if (it != cached.end()) {
      rows[i] = *it->second;
      ++s.reused;
    } else {
      todo.push_back(i);
    }
  }

  std::mutex writer;
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= todo.size()) return;
      const ManifestEntry& e = manifest[todo[k]];
      InvariantRecord r;
      try {
        r = process_entry(e, config);
      } catch (const Error& err) {
        r = e.metadata;
        r.config_hash = hash;
        r.status = "error";
        r.error = std::string(kind_name(err.kind())) + ": " + err.what();
      } catch (const std::exception& err) {
        r = e.metadata;
        r.config_hash = hash;
        r.status = "error";
        r.error = err.what();
      }
      std::lock_guard lock(writer);
      rows[todo[k]] = r;
      if (options.on_row) options.on_row(r);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(todo.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  s.computed = todo.size();
  for (const auto& r : rows)
    if (r.status == "error") ++s.failed;
  if (summary) *summary = s;
  return rows;
}

}  // namespace tightknot
