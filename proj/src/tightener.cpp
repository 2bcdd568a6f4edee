#include "tightknot/tightener.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_set>

#include <Eigen/SparseCholesky>

#include "tightknot/io.hpp"
#include "tightknot/nnls.hpp"

namespace tightknot {

namespace {

constexpr std::uint64_t kCurvatureTag = 0;
constexpr std::uint64_t kStrutTag = 1;
constexpr double kFeasibilitySlack = 1e-9;

std::uint64_t curvature_key(std::size_t vertex, int side) {
  return (kCurvatureTag << 62) | (static_cast<std::uint64_t>(vertex) << 1) |
         static_cast<std::uint64_t>(side);
}

std::uint64_t strut_key(std::uint64_t fa, std::uint64_t fb) {
  if (fa > fb) std::swap(fa, fb);
  return (kStrutTag << 62) | (fa << 31) | fb;
}

Eigen::VectorXd flatten(const PolygonalKnot& knot) {
  Eigen::VectorXd x(3 * knot.size());
  for (std::size_t i = 0; i < knot.size(); ++i) x.segment<3>(3 * i) = knot.vertex(i);
  return x;
}

PolygonalKnot unflatten(const PolygonalKnot& like, const Eigen::VectorXd& x) {
  std::vector<Point3> v(like.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.segment<3>(3 * i);
  return like.with_vertices(std::move(v));
}

void add_curvature_rows(const PolygonalKnot& knot, double activation,
                        std::vector<ConstraintRow>& rows) {
  for (std::size_t i = 0; i < knot.size(); ++i) {
    const std::size_t p = knot.prev(i);
    const std::size_t q = knot.next(i);
    const Point3 a = knot.vertex(i) - knot.vertex(p);
    const Point3 b = knot.vertex(q) - knot.vertex(i);
    const Point3 c = a.cross(b);
    const double qn = c.norm();
    if (qn <= 0.0) continue;  // straight vertex: radius is infinite
    const double la = a.norm();
    const double lb = b.norm();
    const double pn = la * lb + a.dot(b);
    const Point3 ua = a / la;
    const Point3 ub = b / lb;
    const Point3 dp_da = ua * lb + b;
    const Point3 dp_db = ub * la + a;
    const Point3 dq_da = b.cross(c) / qn;
    const Point3 dq_db = c.cross(a) / qn;

    for (int side = 0; side < 2; ++side) {
      const double len = side == 0 ? la : lb;
      const double r = len * pn / (2.0 * qn);
      if (r > activation) continue;
      const Point3 dl_da = side == 0 ? ua : Point3::Zero();
      const Point3 dl_db = side == 0 ? Point3::Zero() : ub;
      const Point3 dr_da =
          (dl_da * pn + len * dp_da) / (2.0 * qn) - len * pn * dq_da / (2.0 * qn * qn);
      const Point3 dr_db =
          (dl_db * pn + len * dp_db) / (2.0 * qn) - len * pn * dq_db / (2.0 * qn * qn);
      ConstraintRow row;
      row.key = curvature_key(i, side);
      row.value = r;
      row.count = 3;
      row.vertex = {p, i, q, 0};
      row.gradient = {-dr_da, dr_da - dr_db, dr_db, Point3::Zero()};
      rows.push_back(row);
    }
  }
}

void add_strut_rows(const PolygonalKnot& knot, double activation,
                    std::vector<ConstraintRow>& rows) {
  constexpr double kEnd = 1e-12;
  // Contacts are non-smooth: a pair that just fails the criticality test
  // can turn critical after an arbitrarily small move, so nearly critical
  // pairs get rows too. Strictly non-critical pairs closer than the
  // activation floor are neighbours along the curve and stay out.
  constexpr double kSlack = 0.2;
  for (const Strut& s : find_struts(knot, 2.0 * activation, StrutSearch::kGrid, kSlack)) {
    const std::size_t a0 = s.edge_a;
    const std::size_t a1 = knot.next(s.edge_a);
    const std::size_t b0 = s.edge_b;
    const std::size_t b1 = knot.next(s.edge_b);
    const Point3 pa = knot.vertex(a0) + s.s * (knot.vertex(a1) - knot.vertex(a0));
    const Point3 pb = knot.vertex(b0) + s.t * (knot.vertex(b1) - knot.vertex(b0));
    if (s.distance <= 0.0) continue;
    if (s.distance < 2.0 * (1.0 - 1e-6)) {
      bool exact = is_critical_pair(knot, s.edge_a, s.edge_b, {s.distance, s.s, s.t});
      if (!exact) continue;
    }
    const Point3 u = (pa - pb) / s.distance * 0.5;

    ConstraintRow row;
    row.value = 0.5 * s.distance;
    std::uint64_t fa = 0;
    std::uint64_t fb = 0;
    auto add = [&row](std::size_t v, const Point3& g) {
      row.vertex[row.count] = v;
      row.gradient[row.count] = g;
      ++row.count;
    };
    if (s.s <= kEnd) {
      fa = 2 * a0;
      add(a0, u);
    } else if (s.s >= 1.0 - kEnd) {
      fa = 2 * a1;
      add(a1, u);
    } else {
      fa = 2 * s.edge_a + 1;
      add(a0, (1.0 - s.s) * u);
      add(a1, s.s * u);
    }
    if (s.t <= kEnd) {
      fb = 2 * b0;
      add(b0, -u);
    } else if (s.t >= 1.0 - kEnd) {
      fb = 2 * b1;
      add(b1, -u);
    } else {
      fb = 2 * s.edge_b + 1;
      add(b0, -(1.0 - s.t) * u);
      add(b1, -s.t * u);
    }
    row.key = strut_key(fa, fb);
    rows.push_back(row);
  }
}

// Gram matrix G G^T and G f for the given rows.
void assemble_gram(const std::vector<ConstraintRow>& rows, std::size_t vertex_count,
                   const Eigen::VectorXd* force, SparseMatrix& gram, Eigen::VectorXd& gf) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  std::vector<std::vector<std::pair<Eigen::Index, int>>> incident(vertex_count);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (int e = 0; e < rows[k].count; ++e) incident[rows[k].vertex[e]].emplace_back(k, e);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& list : incident) {
    for (const auto& [k, ek] : list) {
      for (const auto& [l, el] : list) {
        triplets.emplace_back(k, l, rows[k].gradient[ek].dot(rows[l].gradient[el]));
      }
    }
  }
  gram.resize(m, m);
  gram.setFromTriplets(triplets.begin(), triplets.end());
  gf = Eigen::VectorXd::Zero(m);
  if (force) {
    for (Eigen::Index k = 0; k < m; ++k) {
      for (int e = 0; e < rows[k].count; ++e) {
        gf[k] += rows[k].gradient[e].dot(force->segment<3>(3 * rows[k].vertex[e]));
      }
    }
  }
}

double row_dot(const ConstraintRow& row, const Eigen::VectorXd& d) {
  double s = 0.0;
  for (int e = 0; e < row.count; ++e) s += row.gradient[e].dot(d.segment<3>(3 * row.vertex[e]));
  return s;
}

double max_vertex_norm(const Eigen::VectorXd& d) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < d.size() / 3; ++i) m = std::max(m, d.segment<3>(3 * i).norm());
  return m;
}

// Pushes violated constraints back to 1 with minimum-norm moves that keep
// the nearly active ones satisfied: min |delta| s.t. G delta >= 1 - g over
// rows within the activation margin, solved through its dual NNLS.
// Returns false if the configuration cannot be repaired.
bool correct(PolygonalKnot& knot, double activation) {
  constexpr double kTarget = 1.0 + 1e-12;
  for (int iter = 0; iter < 8; ++iter) {
    const auto rows = active_constraints(knot, activation);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) worst = std::min(worst, r.value);
    if (!(worst < 1.0)) return true;
    SparseMatrix gram;
    Eigen::VectorXd unused;
    assemble_gram(rows, knot.size(), nullptr, gram, unused);
    Eigen::VectorXd c(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) c[k] = rows[k].value - kTarget;
    const Eigen::VectorXd lambda = solve_gram_nnls(gram, c).x;
    Eigen::VectorXd x = flatten(knot);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (lambda[k] == 0.0) continue;
      for (int e = 0; e < rows[k].count; ++e) {
        x.segment<3>(3 * rows[k].vertex[e]) += lambda[k] * rows[k].gradient[e];
      }
    }
    if (!x.allFinite()) return false;
    try {
      knot = unflatten(knot, x);
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

PolygonalKnot rescaled_about_centroid(const PolygonalKnot& knot, double factor) {
  const Point3 c = knot.centroid();
  std::vector<Point3> v(knot.vertices().begin(), knot.vertices().end());
  for (auto& p : v) p = c + factor * (p - c);
  return knot.with_vertices(std::move(v));
}

// Sum of squared deviations from the mean edge length, over the mean; scales
// like length.
double edge_spread(const PolygonalKnot& knot) {
  const double mean = mean_edge_length(knot);
  double s = 0.0;
  for (std::size_t i = 0; i < knot.size(); ++i) {
    const double d = edge_length(knot, i) - mean;
    s += d * d;
  }
  return s / mean;
}

double phase_force_weight(const TighteningConfig& config, int phase) {
  return phase == 0 ? config.equilateralization_weight : 0.0;
}

}  // namespace

void TighteningConfig::validate() const {
  if (phase1_max_steps < 0 || phase2_max_steps < 0) {
    throw Error(ErrorKind::kInvalidArgument, "step counts must be non-negative");
  }
  if (!(phase1_residual_target > 0.0) || !(phase2_residual_target > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "residual targets must be positive");
  }
  if (!(equilateralization_weight >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "equilateralization weight must be >= 0");
  }
  if (!(step_scale > 0.0) || !(max_step_scale >= step_scale) || !(min_step > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "step sizes must be positive and ordered");
  }
  if (!(contact_activation_distance >= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "contact activation must be >= 1");
  }
  if (stall_window < 1 || trace_interval < 1) {
    throw Error(ErrorKind::kInvalidArgument, "stall window and trace interval must be >= 1");
  }
}

std::uint64_t TighteningConfig::hash() const {
  std::ostringstream s;
  s << phase1_max_steps << ' ' << format_real(phase1_residual_target) << ' ' << phase2_max_steps
    << ' ' << format_real(phase2_residual_target) << ' ' << format_real(equilateralization_weight)
    << ' ' << format_real(step_scale) << ' ' << format_real(max_step_scale) << ' '
    << format_real(min_step) << ' ' << format_real(contact_activation_distance) << ' '
    << random_seed << ' ' << stall_window << ' ' << format_real(stall_tolerance);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kNotRun: return "not-run";
    case Termination::kResidualMet: return "residual-met";
    case Termination::kStepLimit: return "step-limit";
    case Termination::kStalled: return "stalled";
  }
  return "not-run";
}

Termination termination_from_string(std::string_view text) {
  for (auto t : {Termination::kNotRun, Termination::kResidualMet, Termination::kStepLimit,
                 Termination::kStalled}) {
    if (to_string(t) == text) return t;
  }
  throw Error(ErrorKind::kParse, "unknown termination reason '" + std::string(text) + "'");
}

std::vector<ConstraintRow> active_constraints(const PolygonalKnot& knot, double activation) {
  std::vector<ConstraintRow> rows;
  add_curvature_rows(knot, activation, rows);
  add_strut_rows(knot, activation, rows);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ConstraintRow& a, const ConstraintRow& b) { return a.key < b.key; });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const ConstraintRow& a, const ConstraintRow& b) {
                           return a.key == b.key;
                         }),
             rows.end());
  return rows;
}

Eigen::VectorXd descent_force(const PolygonalKnot& knot, double equilateralization_weight) {
  const std::size_t n = knot.size();
  Eigen::VectorXd f(3 * n);
  const double mean = mean_edge_length(knot);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 to_next = knot.vertex(knot.next(i)) - knot.vertex(i);
    const Point3 to_prev = knot.vertex(knot.prev(i)) - knot.vertex(i);
    const double ep = to_next.norm();
    const double em = to_prev.norm();
    Point3 g = to_next / ep + to_prev / em;
    if (equilateralization_weight > 0.0) {
      const Point3 chord = to_next - to_prev;
      const double cl = chord.norm();
      if (cl > 0.0) g += equilateralization_weight * ((ep - em) / mean) * (chord / cl);
    }
    f.segment<3>(3 * i) = g;
  }
  if (!f.allFinite()) throw Error(ErrorKind::kConvergence, "non-finite descent force");
  return f;
}

Projection project_direction(const Eigen::VectorXd& force, const std::vector<ConstraintRow>& rows,
                             const std::vector<char>& warm) {
  Projection out;
  out.direction = force;
  out.multipliers.assign(rows.size(), 0.0);
  if (rows.empty()) return out;
  SparseMatrix gram;
  Eigen::VectorXd gf;
  assemble_gram(rows, static_cast<std::size_t>(force.size() / 3), &force, gram, gf);
  const NnlsResult mu = solve_gram_nnls(gram, gf, warm);
  out.min_normal_product = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.multipliers[k] = mu.x[static_cast<Eigen::Index>(k)];
    if (out.multipliers[k] == 0.0) continue;
    for (int e = 0; e < rows[k].count; ++e) {
      out.direction.segment<3>(3 * rows[k].vertex[e]) += out.multipliers[k] * rows[k].gradient[e];
    }
  }
  for (const auto& row : rows) {
    out.min_normal_product = std::min(out.min_normal_product, row_dot(row, out.direction));
  }
  if (!out.direction.allFinite()) {
    throw Error(ErrorKind::kConvergence, "non-finite projected direction");
  }
  return out;
}

double residual(const PolygonalKnot& knot, const TighteningConfig& config) {
  const PolygonalKnot unit = rescaled_to_thickness(knot, 1.0);
  const auto rows = active_constraints(unit, config.contact_activation_distance);
  const Projection p = project_direction(descent_force(unit, 0.0), rows);
  return p.direction.norm() / static_cast<double>(unit.size());
}

TighteningResult tighten(const PolygonalKnot& input, const TighteningConfig& config,
                         const TighteningHooks& hooks) {
  config.validate();
  if (thickness(input).thickness <= 0.0) {
    throw Error(ErrorKind::kGeometry, "input knot is not embedded (thickness <= 0)");
  }
  PolygonalKnot knot = rescaled_to_thickness(input, 1.0);
  const double n = static_cast<double>(knot.size());

  TighteningState st;
  if (hooks.resume) {
    st = *hooks.resume;
  } else {
    st.step = config.step_scale * mean_edge_length(knot);
  }
  TighteningReport& rep = st.report;
  double rope = length(knot);
  if (rep.ropelength_trace.empty()) rep.ropelength_trace.push_back({st.total_steps, rope});

  std::unordered_set<std::uint64_t> warm_keys;
  const std::array<long, 2> limits{config.phase1_max_steps, config.phase2_max_steps};
  const std::array<double, 2> targets{config.phase1_residual_target,
                                      config.phase2_residual_target};

  for (; st.phase < 2; ++st.phase, st.step_in_phase = 0, st.stall_count = 0) {
    PhaseReport& ph = rep.phases[st.phase];
    const double weight = phase_force_weight(config, st.phase);
    ph.reason = Termination::kStepLimit;
    if (st.step_in_phase == 0) st.step = config.step_scale * mean_edge_length(knot);

    while (true) {
      const auto rows = active_constraints(knot, config.contact_activation_distance);
      std::vector<char> warm(rows.size(), 0);
      for (std::size_t k = 0; k < rows.size(); ++k) warm[k] = warm_keys.count(rows[k].key) ? 1 : 0;

      const Projection proj = project_direction(descent_force(knot, weight), rows, warm);
      ph.residual = proj.direction.norm() / n;
      rep.final_residual = ph.residual;
      if (config.check_projection && !rows.empty()) {
        rep.max_projection_violation =
            std::max(rep.max_projection_violation, -proj.min_normal_product);
      }
      if (ph.residual <= targets[st.phase]) {
        ph.reason = Termination::kResidualMet;
        break;
      }
      if (st.step_in_phase >= limits[st.phase]) break;

      warm_keys.clear();
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (proj.multipliers[k] > 0.0) warm_keys.insert(rows[k].key);
      }

      // Trial moves: halve the step until the corrected configuration is
      // feasible and does not raise the merit. With the equilateralization
      // force on, the merit adds the weighted edge-length spread, since that
      // force alone is not a descent direction for length.
      const double hmax = config.max_step_scale * mean_edge_length(knot);
      const double merit = rope + weight * edge_spread(knot);
      bool accepted = false;
      PolygonalKnot trial;
      double trial_rope = rope;
      double trial_thickness = 1.0;
      const Eigen::VectorXd x0 = flatten(knot);
      const double dmax = max_vertex_norm(proj.direction);
      while (st.step >= config.min_step && dmax > 0.0) {
        const Eigen::VectorXd x1 = x0 + (st.step / dmax) * proj.direction;
        bool ok = x1.allFinite();
        if (ok) {
          try {
            trial = unflatten(knot, x1);
            ok = correct(trial, config.contact_activation_distance);
          } catch (const Error&) {
            ok = false;
          }
        }
        if (ok) {
          trial_thickness = thickness(trial).thickness;
          ok = trial_thickness >= 1.0 - kFeasibilitySlack;
        }
        if (ok) {
          trial_rope = length(trial) / trial_thickness;
          ok = trial_rope + weight * edge_spread(trial) / trial_thickness <= merit;
        }
        if (ok) {
          accepted = true;
          break;
        }
        ++rep.rejected_steps;
        st.step *= 0.5;
      }
      if (!accepted) {
        ph.reason = Termination::kStalled;
        break;
      }

      knot = rescaled_about_centroid(trial, 1.0 / trial_thickness);
      const double gain = rope - trial_rope;
      rope = length(knot);
      st.step = std::min(st.step * 1.25, hmax);
      ++st.step_in_phase;
      ++st.total_steps;
      ph.steps = st.step_in_phase;
      st.stall_count = gain < config.stall_tolerance ? st.stall_count + 1 : 0;
      if (st.total_steps % config.trace_interval == 0) {
        rep.ropelength_trace.push_back({st.total_steps, rope});
      }
      if (hooks.checkpoint_interval > 0 && hooks.on_checkpoint &&
          st.total_steps % hooks.checkpoint_interval == 0) {
        hooks.on_checkpoint(knot, st);
      }
      if (st.stall_count >= config.stall_window) {
        ph.reason = Termination::kStalled;
        break;
      }
    }
  }

  if (rep.ropelength_trace.back().step != st.total_steps) {
    rep.ropelength_trace.push_back({st.total_steps, rope});
  }
  rep.final_ropelength = rope;
  if (hooks.checkpoint_interval > 0 && hooks.on_checkpoint) hooks.on_checkpoint(knot, st);
  return {knot, rep};
}

}  // namespace tightknot
