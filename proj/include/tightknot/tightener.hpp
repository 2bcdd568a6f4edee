#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tightknot/geometry.hpp"

namespace tightknot {

struct TighteningConfig {
  long phase1_max_steps = 25000;
  double phase1_residual_target = 0.1;
  long phase2_max_steps = 12000;
  double phase2_residual_target = 0.001;
  double equilateralization_weight = 1.0;
  // Initial largest per-vertex displacement, in units of the mean edge length.
  // Grows by 1.25 after accepted steps (up to max_step_scale) and halves on
  // rejected ones.
  double step_scale = 1e-3;
  double max_step_scale = 0.1;
  double min_step = 1e-12;
  // Struts shorter than 2x this and curvature radii below it are active.
  double contact_activation_distance = 1.001;
  std::uint64_t random_seed = 0;  // recorded only; the run is deterministic
  long stall_window = 500;
  double stall_tolerance = 1e-8;
  long trace_interval = 100;
  bool check_projection = false;  // verify G d >= 0 on every step

  void validate() const;
  // Stable FNV-1a digest of every field, for result caching.
  std::uint64_t hash() const;
};

enum class Termination { kNotRun, kResidualMet, kStepLimit, kStalled };
std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view text);

struct PhaseReport {
  long steps = 0;
  Termination reason = Termination::kNotRun;
  double residual = 0.0;
};

struct TracePoint {
  long step = 0;
  double ropelength = 0.0;
};

struct TighteningReport {
  std::array<PhaseReport, 2> phases{};
  double final_residual = 0.0;
  std::vector<TracePoint> ropelength_trace;
  double final_ropelength = 0.0;
  long rejected_steps = 0;
  double max_projection_violation = 0.0;  // filled when check_projection is set
};

// Everything needed to continue an interrupted run from its current knot.
struct TighteningState {
  int phase = 0;  // 0 or 1; 2 once finished
  long step_in_phase = 0;
  long total_steps = 0;
  double step = 0.0;  // current displacement cap (absolute length)
  long stall_count = 0;
  TighteningReport report;
};

struct TighteningHooks {
  long checkpoint_interval = 0;  // 0 disables
  std::function<void(const PolygonalKnot&, const TighteningState&)> on_checkpoint;
  const TighteningState* resume = nullptr;
};

struct TighteningResult {
  PolygonalKnot knot;
  TighteningReport report;
};

TighteningResult tighten(const PolygonalKnot& knot, const TighteningConfig& config,
                         const TighteningHooks& hooks = {});

// Norm of the projected length gradient divided by the vertex count, at the
// knot rescaled to unit thickness.
double residual(const PolygonalKnot& knot, const TighteningConfig& config);

// One linearised constraint, value >= 1 when satisfied: either half a strut
// length or a one-sided curvature radius.
struct ConstraintRow {
  std::uint64_t key = 0;
  double value = 0.0;
  int count = 0;
  std::array<std::size_t, 4> vertex{};
  std::array<Point3, 4> gradient{};
};

// Struts with length <= 2*activation and one-sided curvature radii
// <= activation, de-duplicated by the pair of features they touch.
std::vector<ConstraintRow> active_constraints(const PolygonalKnot& knot, double activation);

// Descent direction (3n entries) before projection: minus the length
// gradient plus the weighted equilateralization force.
Eigen::VectorXd descent_force(const PolygonalKnot& knot, double equilateralization_weight);

struct Projection {
  Eigen::VectorXd direction;
  std::vector<double> multipliers;
  double min_normal_product = 0.0;  // min over rows of grad . direction
};

// d = f + G^T mu with mu = argmin_{mu >= 0} |f + G^T mu|.
Projection project_direction(const Eigen::VectorXd& force,
                             const std::vector<ConstraintRow>& rows,
                             const std::vector<char>& warm = {});

struct PreprocessConfig {
  long coulomb_steps = 200;
  double coulomb_strength = 1.0;
  double tangential_strength = 1.0;
  double damping = 0.5;

  void validate() const;
};

struct PreprocessReport {
  long steps = 0;
  long capped_steps = 0;  // steps where the quarter-distance cap bound
  bool starved = false;   // the cap collapsed the motion to nothing
};

struct PreprocessResult {
  PolygonalKnot knot;
  PreprocessReport report;
};

PreprocessResult preprocess(const PolygonalKnot& knot, const PreprocessConfig& config);

// Resamples each component at equal arclength chords; the output has
// target_count vertices per component (single component: target_count total).
PolygonalKnot equilateralize(const PolygonalKnot& knot, std::size_t target_count);

// Checkpoint = knot file at `path` plus "<path>.state" with the run state.
void save_checkpoint(const std::filesystem::path& path, const PolygonalKnot& knot,
                     const TighteningState& state);
struct Checkpoint {
  PolygonalKnot knot;
  TighteningState state;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tightknot
