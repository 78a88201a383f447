#include "doctest.h"

#include "qadd/ising.hpp"
#include "qadd/problems.hpp"

using namespace qadd;

namespace {

// entrywise comparison against a printed matrix, optionally skipping cells
double max_deviation(const IsingModel& got, const IsingModel& want,
                     const std::vector<std::pair<int, int>>& skip = {}) {
  REQUIRE(got.n_spins() == want.n_spins());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.n_spins(); ++i)
    for (Eigen::Index j = i + 1; j < got.n_spins(); ++j) {
      if (std::find(skip.begin(), skip.end(),
                    std::make_pair(int(i), int(j))) != skip.end())
        continue;
      worst = std::max(worst, std::abs(got.couplings(i, j) - want.couplings(i, j)));
    }
  return worst;
}

}  // namespace

TEST_CASE("mot constraints match the printed system") {
  const auto [a, b] = mot_constraints(mot5_spec());
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 1, 0, 0,
              0, 0, 1, 1,
              1, 0, 1, 0,
              0, 1, 0, 1;
  CHECK(a == expected);
  CHECK(b == Eigen::VectorXd::Ones(4));
}

TEST_CASE("mot constraints: one track, one detection") {
  MotSpec s;
  s.tracks = 1;
  s.detections = 1;
  s.free_frames = 1;
  s.fixed_assignment = {1};
  const auto [a, b] = mot_constraints(s);
  CHECK(a.rows() == 2);  // one detection row, one track row
  CHECK(a.cols() == 1);
  CHECK(a(0, 0) == 1.0);
  CHECK(b[0] == 1.0);
}

TEST_CASE("mot constraints: two free frames are block diagonal") {
  MotSpec s = mot5_spec();
  s.free_frames = 2;
  const auto [a, b] = mot_constraints(s);
  CHECK(a.rows() == 8);
  CHECK(a.cols() == 8);
  CHECK(b.size() == 8);
  // each row sums to the group size, and frames do not mix
  for (int r = 0; r < 4; ++r) {
    CHECK(a.row(r).head(4).sum() == 2.0);
    CHECK(a.row(r).tail(4).sum() == 0.0);
  }
  for (int r = 4; r < 8; ++r) {
    CHECK(a.row(r).head(4).sum() == 0.0);
    CHECK(a.row(r).tail(4).sum() == 2.0);
  }
}

TEST_CASE("invalid mot specs are rejected") {
  MotSpec s = mot5_spec();
  s.free_frames = 0;
  CHECK_THROWS_AS(build_mot(s), std::invalid_argument);
  s = mot5_spec();
  s.fixed_assignment = {1, 1, 0, 0};  // detection 0 on both tracks
  CHECK_THROWS_AS(build_mot(s), std::invalid_argument);
}

TEST_CASE("single-free-frame objective is diagonal with the provided weights") {
  const QuboProblem q = build_mot(mot5_spec());
  Eigen::VectorXd diag(4);
  diag << -2.18, -0.95, -0.58, -2.26;
  CHECK((q.objective.diagonal() - diag).cwiseAbs().maxCoeff() == 0.0);
  CHECK((q.objective - Eigen::MatrixXd(q.objective.diagonal().asDiagonal()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("zero weights and zero penalty give the zero qubo") {
  MotSpec s = mot5_spec();
  s.similarity[{0, 1}].setZero();
  s.penalty = 0.0;
  const QuboProblem q = build_mot(s);
  CHECK(q.objective.cwiseAbs().maxCoeff() == 0.0);
  const FoldedQubo folded = penalty_fold(q);
  CHECK(folded.q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mot5 chain reproduces the printed five-qubit matrix") {
  const IsingModel built = preset_model("mot5");
  const IsingModel fixture = paper_fixture("mot5");
  // (0,4) differs by 0.006: the printed weight vector rounds W_4 to -2.26
  // while the printed matrix shows -0.91; the builder value is W_4 / lambda
  // = -0.904.
  CHECK(max_deviation(built, fixture, {{0, 4}}) <= 0.005);
  CHECK(built.couplings(0, 4) == doctest::Approx(-0.904).epsilon(1e-9));
  CHECK(fixture.couplings(0, 4) == -0.91);
}

TEST_CASE("mot9 chain reproduces the printed nine-qubit matrix") {
  const IsingModel built = preset_model("mot9");
  const IsingModel fixture = paper_fixture("mot9");
  CHECK(max_deviation(built, fixture) <= 0.005);
  CHECK(built.scale == doctest::Approx(1.5));  // lambda / 2
}

TEST_CASE("cut5 chain reproduces the printed five-qubit matrix") {
  const CutStockSpec spec = cut5_spec();
  const QuboProblem q = build_cutting_stock(spec);
  CHECK(q.constraint_matrix.rows() == 1);
  Eigen::RowVectorXd row(4);
  row << 1, 1, 1, 2;
  CHECK(q.constraint_matrix.row(0) == row);
  CHECK(q.constraint_rhs[0] == 3.0);
  CHECK(max_deviation(preset_model("cut5"), paper_fixture("cut5")) <= 0.005);
}

TEST_CASE("cut6 chain matches the printed matrix away from the misprints") {
  const QuboProblem q = build_cutting_stock(cut6_spec());
  Eigen::RowVectorXd row(5);
  row << 2, 2, 1, 2, 4;
  CHECK(q.constraint_matrix.row(0) == row);
  CHECK(q.constraint_rhs[0] == 4.0);

  const IsingModel built = preset_model("cut6");
  const IsingModel fixture = paper_fixture("cut6");
  // the printed matrix shows 1.67 at (1,3), (2,3), (3,4); the arithmetic
  // value is 1/6 (a normalized matrix cannot exceed 1), so those cells are
  // pinned separately
  const std::vector<std::pair<int, int>> misprints = {{1, 3}, {2, 3}, {3, 4}};
  CHECK(max_deviation(built, fixture, misprints) <= 0.005);
  for (const auto& [i, j] : misprints) {
    CHECK(built.couplings(i, j) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(fixture.couplings(i, j) == 1.67);
  }
}

TEST_CASE("minimal cutting stock: one piece, one slack bit") {
  CutStockSpec s;
  s.bar_length = 1;
  s.piece_lengths = {1};
  s.demands = {1};
  const QuboProblem q = build_cutting_stock(s);
  CHECK(q.n_vars() == 2);  // assignment + 2^0 slack
  CHECK(q.constraint_matrix.row(0) == Eigen::RowVector2d(1, 1));
  // ground state: piece cut, slack 0
  const GroundStates gs = brute_force_ground_states(encode_qubo(q, false));
  REQUIRE(gs.states.size() == 1);
  CHECK(gs.states[0].spins[0] == 1);   // x = 1
  CHECK(gs.states[0].spins[1] == -1);  // slack = 0
}

TEST_CASE("piece longer than the bar is rejected") {
  CutStockSpec s;
  s.bar_length = 2;
  s.piece_lengths = {3};
  s.demands = {1};
  CHECK_THROWS_AS(build_cutting_stock(s), std::invalid_argument);
}

TEST_CASE("multi-bar demand constraints become product penalties") {
  CutStockSpec s;
  s.bar_length = 2;
  s.piece_lengths = {1};
  s.demands = {1};
  s.n_bars = 2;
  s.penalty = 2.0;
  const QuboProblem q = build_cutting_stock(s);
  REQUIRE(q.product_penalties.size() == 1);
  CHECK(q.product_penalties[0].weight == 2.0);
  // every minimizer cuts the unit piece exactly once
  const int n = static_cast<int>(q.n_vars());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (b >> i) & 1;
    best = std::min(best, q.energy(x));
  }
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (b >> i) & 1;
    if (q.energy(x) <= best + 1e-9) CHECK(x[0] + x[1] == 1.0);
  }
}

TEST_CASE("aggregated demand slack is the documented alternative encoding") {
  CutStockSpec s;
  s.bar_length = 2;
  s.piece_lengths = {1};
  s.demands = {1};
  s.n_bars = 2;
  s.penalty = 1.5;
  s.aggregated_demand_slack = true;
  const QuboProblem q = build_cutting_stock(s);
  // 2 assignment vars + 2 bars x 2 capacity slack bits + one demand slack bit
  CHECK(q.n_vars() == 7);
  CHECK(q.constraint_matrix.rows() == 3);  // 2 capacity rows + 1 demand row
  CHECK(q.product_penalties.empty());
  CHECK(q.constraint_rhs[2] == 1.0);

  // default mode realizes the same inequality as a product penalty instead
  s.aggregated_demand_slack = false;
  const QuboProblem u = build_cutting_stock(s);
  CHECK(u.constraint_matrix.rows() == 2);
  CHECK(u.n_vars() == 6);
  CHECK(u.product_penalties.size() == 1);

  // both encodings agree on the decoded optimum: the piece is cut once
  for (const QuboProblem* p : {&q, &u}) {
    const int n = static_cast<int>(p->n_vars());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x[i] = (b >> i) & 1;
      best = std::min(best, p->energy(x));
    }
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x[i] = (b >> i) & 1;
      if (p->energy(x) <= best + 1e-9) CHECK(x[0] + x[1] == 1.0);
    }
  }
}

TEST_CASE("cutting stock ground states satisfy the capacity equality") {
  for (const char* name : {"cut5", "cut6"}) {
    const CutStockSpec spec = name == std::string("cut5") ? cut5_spec() : cut6_spec();
    const QuboProblem q = build_cutting_stock(spec);
    const GroundStates gs = brute_force_ground_states(preset_model(name));
    for (const auto& s : gs.states) {
      const int anc = s.spins[0];
      Eigen::VectorXd x(q.n_vars());
      for (Eigen::Index i = 0; i < q.n_vars(); ++i)
        x[i] = (1 + anc * s.spins[i + 1]) / 2;
      CHECK((q.constraint_matrix * x - q.constraint_rhs).cwiseAbs().maxCoeff() ==
            0.0);
    }
  }
}

TEST_CASE("fixture registry") {
  CHECK(fixture_names().size() == 4);
  CHECK(paper_fixture("mot5").couplings(0, 1) == -0.87);
  CHECK(paper_fixture("mot5").couplings(1, 2) == 1.0);
  CHECK(paper_fixture("mot5").max_abs_coupling() == 1.0);
  CHECK(paper_fixture("mot9").couplings(0, 1) == -0.96);
  CHECK(paper_fixture("mot9").couplings(1, 5) == -0.19);
  CHECK(paper_fixture("cut6").couplings(0, 5) == 1.0);
  CHECK(paper_fixture("cut6").couplings(1, 3) == 1.67);
  CHECK_THROWS_AS(paper_fixture("nope"), std::invalid_argument);
  CHECK(fixture_meta("mot9").driver_strength == 2.0);
  CHECK(fixture_meta("cut5").j_hz == 260.0);
}

TEST_CASE("fixture ground pairs are flip symmetric, mot5 decodes validly") {
  for (const char* name : {"mot5", "mot9", "cut5", "cut6"}) {
    const GroundStates gs = brute_force_ground_states(paper_fixture(name));
    REQUIRE(gs.states.size() == 2);
    CHECK(gs.states[0].flipped() == gs.states[1]);
  }
  // mot5 ground state decodes to an assignment satisfying the constraints
  const GroundStates gs = brute_force_ground_states(paper_fixture("mot5"));
  const MotSpec spec = mot5_spec();
  const auto [a, b] = mot_constraints(spec);
  for (const auto& s : gs.states) {
    const int anc = s.spins[0];
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x[i] = (1 + anc * s.spins[i + 1]) / 2;
    CHECK((a * x - b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spec documents round trip") {
  const MotSpec m = mot9_spec();
  const MotSpec m2 = mot_spec_from_json(mot_spec_to_json(m));
  CHECK(m2.penalty == m.penalty);
  CHECK(m2.offdiag_rescale == m.offdiag_rescale);
  CHECK(m2.similarity.at({1, 2}) == m.similarity.at({1, 2}));

  const CutStockSpec c = cut6_spec();
  const CutStockSpec c2 = cutstock_spec_from_json(cutstock_spec_to_json(c));
  CHECK(c2.bar_length == c.bar_length);
  CHECK(c2.piece_lengths == c.piece_lengths);
}
