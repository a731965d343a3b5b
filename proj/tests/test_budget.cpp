#include <atomic>
#include <sstream>

#include "doctest.h"
#include "iongrad/budget.hpp"
#include "iongrad/parallel.hpp"

using namespace iongrad;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("pair selection") {
  CHECK(innermost_pair(2) == std::array<int, 2>{0, 1});
  CHECK(outermost_pair(2) == std::array<int, 2>{0, 1});
  CHECK(innermost_pair(8) == std::array<int, 2>{3, 4});
  CHECK(outermost_pair(8) == std::array<int, 2>{0, 7});
  CHECK(innermost_pair(5) == std::array<int, 2>{2, 3});
  CHECK(innermost_pair(12) == std::array<int, 2>{5, 6});
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, [&](int i) { hits[i]++; }, 4);
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_WITH(parallel_for(
                        10, [](int i) { if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i)); }, 3),
                    "3");
}

TEST_CASE("two-ion axial budget") {
  CrystalSpec spec;
  DriveConfig d;
  NoiseModel n;
  BudgetOptions opt;
  opt.radial.reset();
  opt.threads = 2;
  const auto rep = assemble_budget(spec, d, n, {}, opt);
  CHECK(rep.has_axial);
  CHECK_FALSE(rep.has_radial);
  REQUIRE(rep.rows.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) CHECK(rep.rows[i].mechanism == kMechanisms[i]);
  CHECK(rep.row(Mechanism::rf_pulses).axial == 2.4e-4);
  CHECK(rep.row(Mechanism::scattering).axial == 1.2e-4);
  CHECK(rep.row(Mechanism::rf_pulses).source == Source::input_constant);
  double sum = 0;
  for (const auto& r : rep.rows) {
    CHECK(r.axial >= 0.0);
    sum += r.axial;
  }
  CHECK(rep.total_axial == doctest::Approx(sum).epsilon(1e-14));
  // a single COM mode sees no spectator on two ions except the stretch mode
  CHECK(rep.row(Mechanism::spectator_modes).axial < 1e-3);

  std::ostringstream text, csv;
  rep.write_text(text);
  rep.write_csv(csv);
  CHECK(count_lines(csv.str()) == 9);
  CHECK(text.str().find("Total") != std::string::npos);
  CHECK(rep.json().find("\"total_axial\"") != std::string::npos);

  opt.threads = 1;
  CHECK(assemble_budget(spec, d, n, {}, opt).json() == rep.json());
}

TEST_CASE("chain sweep shape") {
  CrystalSpec spec;
  DriveConfig d;
  NoiseModel n;
  const auto pts = fidelity_vs_chain_length(spec, d, n, {}, {2, 3});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].pairs.size() == 1);
  CHECK(pts[1].pairs.size() == 2);
  CHECK(pts[1].mean_total > 0);
  std::ostringstream os;
  write_sweep_csv(os, pts);
  CHECK(count_lines(os.str()) == 3);
  CHECK(os.str().rfind("n_ions,pair,total_infidelity,row_breakdown_json\n", 0) == 0);
}
