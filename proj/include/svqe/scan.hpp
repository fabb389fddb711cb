#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svqe/model.hpp"
#include "svqe/vqe.hpp"

namespace svqe {

/// Chemical-potential sweep over nu_0 with nu_1 fixed and nu_2 = -nu_0
/// (or a fixed nu_2 when `tie_nu2` is false). Requires F = 3.
struct ScanConfig {
  ModelParams model;  ///< sites, flavors, x and mu; nu is filled per point
  double nu1 = 0.0;
  bool tie_nu2 = true;
  double nu2 = 0.0;  ///< used only when tie_nu2 is false
  double lo = -3.0;
  double hi = 3.0;
  int steps = 41;
  int layers = 5;
  bool constrained = false;
  int ed_levels = 4;
  OptimizerSettings optimizer;

  std::string csv_path;
  std::string json_path;
  std::string transitions_path;
  std::string checkpoint_path;  ///< JSON lines, one completed point per line

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  double sweep_value(std::size_t index) const;
  ModelParams point_model(std::size_t index) const;
  /// Per-point seed, derived from the scan seed and point index only.
  std::uint64_t point_seed(std::size_t index) const;

  nlohmann::json to_json() const;
};

struct ScanPointResult {
  std::size_t index = 0;
  std::vector<double> nu;  ///< (nu0, nu1, nu2)
  double ed_energy = 0.0;
  std::vector<double> ed_delta_n;  ///< per flavor, for the ED ground vector
  double gap = 0.0;
  int ed_degeneracy = 1;
  std::vector<VqeRunRecord> records;
  std::optional<std::size_t> best;  ///< into records
  bool failed = false;              ///< ED failed or every run is an outlier
  std::string error;
};

/// Exact baseline for one model: zero-charge sector, lowest `levels` states.
SpectrumResult ed_baseline(const ModelParams& p, int levels = 4);

/// ED + multi-start VQE at one sweep point.
ScanPointResult run_point(const ScanConfig& cfg, std::size_t index);

/// Called once per finished point, in completion order.
using PointCallback = std::function<void(const ScanPointResult&)>;

/**
 * Runs every sweep point not present in `completed` and returns all points
 * ordered by index. When cfg.checkpoint_path is set, the checkpoint is
 * rewritten with `completed` and each finished point is appended as it completes.
 */
std::vector<ScanPointResult> run_scan(const ScanConfig& cfg,
                                      std::vector<ScanPointResult> completed = {},
                                      const PointCallback& on_point = {});

/// Points stored in a checkpoint written for the same configuration.
/// Throws std::runtime_error if the checkpoint belongs to a different config.
std::vector<ScanPointResult> load_checkpoint(const ScanConfig& cfg);

enum class PhaseSource { kEd, kVqe };

struct Transition {
  PhaseSource source = PhaseSource::kEd;
  std::size_t index_lo = 0;
  std::size_t index_hi = 0;
  double nu0_lo = 0.0;
  double nu0_hi = 0.0;
  int dn0_lo = 0;
  int dn2_lo = 0;
  int dn0_hi = 0;
  int dn2_hi = 0;
};

/// Rounded (dN0, dN2) phase label of each usable point, compared between
/// consecutive usable points. Failed points are skipped (reported through
/// `skipped` and a warning on std::clog).
std::vector<Transition> detect_transitions(const std::vector<ScanPointResult>& results,
                                           PhaseSource source,
                                           std::vector<std::size_t>* skipped = nullptr);

/// Same rule applied directly to a sequence of (sweep value, dN0, dN2).
std::vector<Transition> transitions_from_labels(const std::vector<double>& sweep,
                                                const std::vector<std::pair<double, double>>& dn,
                                                PhaseSource source);

inline constexpr const char* kPointsCsvHeader =
    "nu0,nu1,nu2,ed_energy,ed_dN0,ed_dN2,gap,best_energy,best_dN0,best_dN2,best_overlap,"
    "n_outliers,n_runs";
inline constexpr const char* kTransitionsCsvHeader =
    "source,index_lo,index_hi,nu0_lo,nu0_hi,dN0_lo,dN2_lo,dN0_hi,dN2_hi";

void write_points_csv(std::ostream& os, const std::vector<ScanPointResult>& results);
void write_transitions_csv(std::ostream& os, const std::vector<Transition>& transitions);

nlohmann::json to_json(const VqeRunRecord& r);
VqeRunRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScanPointResult& p);
ScanPointResult point_from_json(const nlohmann::json& j);
nlohmann::json scan_to_json(const ScanConfig& cfg, const std::vector<ScanPointResult>& results);

/// Writes the points CSV, full JSON and transitions CSV named in `cfg`
/// (empty paths are skipped). Throws std::ios_base::failure on I/O errors.
void emit_outputs(const std::vector<ScanPointResult>& results, const ScanConfig& cfg);

/// `%.17g`
std::string format_double(double v);

}  // namespace svqe
