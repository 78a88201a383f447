#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qadd/ising.hpp"

namespace qadd {

/// Multiple-object-tracking instance over a fixed first frame and
/// `free_frames` subsequent frames, `tracks` tracks and `detections`
/// detections per frame. Variable order is frame-major:
/// index(f, k, l) = (f-1)*D*T + k*T + l for free frame f >= 1, detection k,
/// track l. similarity[{a, b}] holds the detection-pair scores between frames
/// a and b (frame 0 is the fixed one); rows index the detection in frame a.
struct MotSpec {
  int tracks = 2;
  int detections = 2;
  int free_frames = 1;
  std::vector<int> fixed_assignment;  // D*T binary entries for frame 0
  std::map<std::pair<int, int>, Eigen::MatrixXd> similarity;
  double offdiag_rescale = 1.0;  // applied to frame-to-frame objective terms
  double penalty = 0.0;
  int max_frame_gap = 2;

  int vars_per_frame() const { return detections * tracks; }
  int n_vars() const { return free_frames * vars_per_frame(); }
  void validate() const;
};

/// 1D cutting stock: cut pieces of the given lengths out of `n_bars` bars of
/// length `bar_length`, maximizing the total cut length. Demands are expanded
/// to unit pieces before encoding; bar-capacity inequalities get binary slack
/// bits with weights 2^k, per-piece demand inequalities become pairwise
/// product penalties (no slack). Setting aggregated_demand_slack keeps the
/// demands aggregated and encodes each demand inequality with
/// 1+floor(log2(d_i)) slack bits instead.
struct CutStockSpec {
  int bar_length = 1;
  std::vector<int> piece_lengths;
  std::vector<int> demands;
  int n_bars = 1;
  double penalty = 1.0;
  bool aggregated_demand_slack = false;

  void validate() const;
};

// Assignment constraints of the free frames: one row per (frame, detection)
// and one per (frame, track), all with unit rhs.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> mot_constraints(const MotSpec& spec);

QuboProblem build_mot(const MotSpec& spec);
QuboProblem build_cutting_stock(const CutStockSpec& spec);

// Preset specs for the four reference instances.
MotSpec mot5_spec();
MotSpec mot9_spec();
CutStockSpec cut5_spec();
CutStockSpec cut6_spec();

// Normalized reference cost matrices in their printed 2-decimal form
// (ancilla at row 0): mot5, mot9, cut5, cut6.
IsingModel paper_fixture(const std::string& name);

// Annealing defaults associated with each fixture.
struct FixtureMeta {
  std::string name;
  double lambda = 0.0;
  double driver_strength = 0.0;  // h_x in units of J
  double duration = 0.0;         // sweep length in units 1/J
  double j_hz = 0.0;             // reference hardware energy scale
  std::string source;
};
FixtureMeta fixture_meta(const std::string& name);
std::vector<std::string> fixture_names();

// Builder-chain model for a preset name (encode_qubo of the preset spec).
IsingModel preset_model(const std::string& name);

std::string mot_spec_to_json(const MotSpec& spec);
MotSpec mot_spec_from_json(const std::string& text);
std::string cutstock_spec_to_json(const CutStockSpec& spec);
CutStockSpec cutstock_spec_from_json(const std::string& text);

}  // namespace qadd
