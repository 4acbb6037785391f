#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "rspsim/protocol.hpp"

using namespace rsp;

namespace {

const cxd kI{0.0, 1.0};
const double kPi = std::acos(-1.0);

Vec basis8(int i) {
  Vec v = Vec::Zero(8);
  v(i) = 1.0;
  return v;
}

// Full set of preparation angles exercised by the standard scan grids.
std::vector<PhaseSetting> scan_grid() {
  std::vector<PhaseSetting> grid;
  for (int i = 0; i < 12; ++i) grid.emplace_back(90.0, 30.0 * i);
  for (int i = 0; i < 12; ++i) grid.emplace_back(30.0 * i, 0.0);
  for (int i = 0; i < 12; ++i) grid.emplace_back(30.0 * i, 90.0);
  for (int i = 0; i < 12; ++i) grid.emplace_back(109.5, 30.0 * i);
  return grid;
}

}  // namespace

TEST_CASE("phase setting normalization") {
  PhaseSetting s(370.0, -30.0);
  CHECK(s.alpha_deg() == doctest::Approx(10.0));
  CHECK(s.phi_deg() == doctest::Approx(330.0));
  CHECK(s.alpha_rad() == doctest::Approx(10.0 * kPi / 180.0));

  PhaseSetting wraps(720.0, 360.0);
  CHECK(wraps.alpha_deg() == doctest::Approx(0.0));
  CHECK(wraps.phi_deg() == doctest::Approx(0.0));

  CHECK_THROWS_AS(PhaseSetting(std::numeric_limits<double>::infinity(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(PhaseSetting(0.0, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("outcome names and detector ids") {
  CHECK(detector_id(BellOutcome::PsiPlus) == 1);
  CHECK(detector_id(BellOutcome::PsiMinus) == 2);
  CHECK(detector_id(BellOutcome::PhiPlus) == 3);
  CHECK(detector_id(BellOutcome::PhiMinus) == 4);
  for (BellOutcome o : kBellOutcomes) {
    CHECK(outcome_from_name(outcome_name(o)) == o);
  }
  CHECK(outcome_name(BellOutcome::PsiPlus) == "PsiPlus");
  CHECK_THROWS_AS(outcome_from_name("nope"), std::invalid_argument);
}

TEST_CASE("basis convention validation") {
  BasisConvention good;
  CHECK_NOTHROW(good.validate());
  BasisConvention flipped{-1};
  CHECK_NOTHROW(flipped.validate());
  BasisConvention bad{0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("entangled pair amplitudes") {
  auto pair = entangled_atom_photon();
  CHECK(pair.dim() == 4);
  // Ordering (up H, up V, down H, down V); sigma_pm = (|H> pm i |V>)/sqrt(2).
  CHECK(std::abs(pair.amps()(0) - 0.5) < 1e-12);
  CHECK(std::abs(pair.amps()(1) - (-0.5 * kI)) < 1e-12);
  CHECK(std::abs(pair.amps()(2) - 0.5) < 1e-12);
  CHECK(std::abs(pair.amps()(3) - 0.5 * kI) < 1e-12);

  // Overlap with |down>|sigma+> and |up>|sigma-> is 1/sqrt(2) each.
  const double r = 1.0 / std::sqrt(2.0);
  Vec down_sigma_plus(4), up_sigma_minus(4);
  down_sigma_plus << 0.0, 0.0, r, r * kI;
  up_sigma_minus << r, -r * kI, 0.0, 0.0;
  CHECK(std::abs(down_sigma_plus.dot(pair.amps())) == doctest::Approx(r).epsilon(1e-12));
  CHECK(std::abs(up_sigma_minus.dot(pair.amps())) == doctest::Approx(r).epsilon(1e-12));

  auto flipped = entangled_atom_photon(BasisConvention{-1});
  CHECK(std::abs(flipped.amps()(1) - 0.5 * kI) < 1e-12);
  CHECK(std::abs(flipped.amps()(3) - (-0.5 * kI)) < 1e-12);
}

TEST_CASE("entangled pair reduced atom state is maximally mixed") {
  auto rho = density_of(entangled_atom_photon());
  Mat atom = Mat::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int q = 0; q < 2; ++q) atom(a, b) += rho.entries()(2 * a + q, 2 * b + q);
  CHECK((atom - identity2() / 2.0).norm() < 1e-12);
}

TEST_CASE("spatial encoding") {
  auto eq = spatial_encoding(PhaseSetting(90.0, 0.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eq.amps()(0) - r) < 1e-12);
  CHECK(std::abs(eq.amps()(1) - r) < 1e-12);

  auto all_a = spatial_encoding(PhaseSetting(0.0, 123.0));
  CHECK(std::abs(std::abs(all_a.amps()(0)) - 1.0) < 1e-12);
  CHECK(std::abs(all_a.amps()(1)) < 1e-12);

  auto all_b = spatial_encoding(PhaseSetting(180.0, 45.0));
  CHECK(std::abs(all_b.amps()(0)) < 1e-12);
  CHECK(std::abs(all_b.amps()(1) - 1.0) < 1e-12);

  auto phased = spatial_encoding(PhaseSetting(90.0, 90.0));
  CHECK(std::abs(phased.amps()(0) - r * kI) < 1e-12);
  CHECK(std::abs(phased.amps()(1) - r) < 1e-12);
}

TEST_CASE("joint state diagonal structure") {
  auto joint = joint_state(density_of(entangled_atom_photon()),
                           spatial_encoding(PhaseSetting(90.0, 0.0)));
  CHECK(joint.dim() == 8);
  // All eight amplitudes have modulus 1/(2 sqrt 2), so the diagonal is flat.
  for (int i = 0; i < 8; ++i) {
    CHECK(joint.entries()(i, i).real() == doctest::Approx(0.125).epsilon(1e-12));
  }
  CHECK(std::abs(joint.entries().trace() - 1.0) < 1e-12);
}

TEST_CASE("bell states and projectors") {
  const double r = 1.0 / std::sqrt(2.0);
  // Index order (Ha, Hb, Va, Vb).
  auto psi_plus = bell_state(BellOutcome::PsiPlus);
  CHECK(std::abs(psi_plus.amps()(2) - r) < 1e-12);
  CHECK(std::abs(psi_plus.amps()(1) - r) < 1e-12);
  auto psi_minus = bell_state(BellOutcome::PsiMinus);
  CHECK(std::abs(psi_minus.amps()(2) - r) < 1e-12);
  CHECK(std::abs(psi_minus.amps()(1) + r) < 1e-12);
  auto phi_plus = bell_state(BellOutcome::PhiPlus);
  CHECK(std::abs(phi_plus.amps()(0) - r) < 1e-12);
  CHECK(std::abs(phi_plus.amps()(3) - r) < 1e-12);
  auto phi_minus = bell_state(BellOutcome::PhiMinus);
  CHECK(std::abs(phi_minus.amps()(0) - r) < 1e-12);
  CHECK(std::abs(phi_minus.amps()(3) + r) < 1e-12);

  auto projectors = bell_projectors();
  Mat sum = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    const Mat& p = projectors[i].entries();
    CHECK(std::abs(p.trace() - 1.0) < 1e-12);          // rank 1
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);  // idempotent
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK((p * projectors[j].entries()).cwiseAbs().maxCoeff() < 1e-12);
    }
    sum += p;
  }
  CHECK((sum - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("four equal branch probabilities for the ideal input") {
  for (const auto& setting : scan_grid()) {
    auto joint = joint_state(density_of(entangled_atom_photon()), spatial_encoding(setting));
    auto branches = measure_bell(joint);
    double total = 0.0;
    for (const auto& br : branches) {
      CHECK(br.probability == doctest::Approx(0.25).epsilon(1e-9));
      CHECK(br.atom_state.has_value());
      total += br.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("measure_bell on the fully mixed joint state") {
  DensityOperator joint(Mat::Identity(8, 8) / 8.0);
  auto branches = measure_bell(joint);
  for (const auto& br : branches) {
    CHECK(br.probability == doctest::Approx(0.25).epsilon(1e-12));
    REQUIRE(br.atom_state.has_value());
    CHECK((br.atom_state->entries() - identity2() / 2.0).norm() < 1e-12);
  }
}

TEST_CASE("measure_bell flags impossible branches") {
  // Atom |up> with the photon already in a definite Bell state: three
  // branches have probability zero and must carry no conditional state.
  Vec up(2);
  up << 1.0, 0.0;
  Vec joint_amps = Vec::Zero(8);
  auto psi_plus = bell_state(BellOutcome::PsiPlus);
  for (int q = 0; q < 4; ++q) joint_amps(q) = psi_plus.amps()(q);
  DensityOperator joint(joint_amps * joint_amps.adjoint());

  auto branches = measure_bell(joint);
  for (const auto& br : branches) {
    if (br.outcome == BellOutcome::PsiPlus) {
      CHECK(br.probability == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(br.atom_state.has_value());
    } else {
      CHECK(br.probability < 1e-12);
      CHECK(!br.atom_state.has_value());
    }
  }
}

TEST_CASE("target state bloch vector") {
  for (const auto& setting : scan_grid()) {
    auto b = bloch_of(density_of(target_state(setting)));
    const double a = setting.alpha_rad();
    const double p = setting.phi_rad();
    CHECK(b.x == doctest::Approx(std::cos(a)).epsilon(1e-9));
    CHECK(b.y == doctest::Approx(std::sin(a) * std::cos(p)).epsilon(1e-9));
    CHECK(b.z == doctest::Approx(-std::sin(a) * std::sin(p)).epsilon(1e-9));
  }
}

TEST_CASE("target state special points") {
  const double r = 1.0 / std::sqrt(2.0);
  // alpha = 0: +x eigenstate regardless of phi.
  Vec up_x(2);
  up_x << r, r;
  CHECK(fidelity_pure(StateVector(up_x, "z"), density_of(target_state(PhaseSetting(0.0, 17.0)))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // alpha = 90, phi = 0: +y eigenstate.
  Vec up_y(2);
  up_y << r, r * kI;
  CHECK(fidelity_pure(StateVector(up_y, "z"), density_of(target_state(PhaseSetting(90.0, 0.0)))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // alpha = 90, phi = 90: -z eigenstate.
  Vec down_z(2);
  down_z << 0.0, 1.0;
  CHECK(fidelity_pure(StateVector(down_z, "z"),
                      density_of(target_state(PhaseSetting(90.0, 90.0)))) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("target family related by pauli operators") {
  PhaseSetting setting(61.0, 111.0);
  auto t1 = target_family(setting, 1);
  CHECK((t1.amps() - target_state(setting).amps()).norm() < 1e-12);
  auto t2 = target_family(setting, 2);
  CHECK((t2.amps() - Vec(pauli_x() * t1.amps())).norm() < 1e-12);
  auto t3 = target_family(setting, 3);
  CHECK((t3.amps() - Vec(kI * pauli_y() * t1.amps())).norm() < 1e-12);
  auto t4 = target_family(setting, 4);
  CHECK((t4.amps() - Vec(pauli_z() * t1.amps())).norm() < 1e-12);
  CHECK_THROWS_AS(target_family(setting, 0), std::invalid_argument);
  CHECK_THROWS_AS(target_family(setting, 5), std::invalid_argument);

  // sigma_y applied to family member 3 reproduces member 1 exactly up to the
  // fixed phase i baked into the family definition.
  Vec back = pauli_y() * t3.amps();
  CHECK((back - Vec(kI * t1.amps())).norm() < 1e-12);
}

TEST_CASE("family bloch vectors are the pauli reflections") {
  PhaseSetting setting(37.0, 23.0);
  auto b1 = bloch_of(density_of(target_family(setting, 1)));
  auto b2 = bloch_of(density_of(target_family(setting, 2)));
  auto b3 = bloch_of(density_of(target_family(setting, 3)));
  auto b4 = bloch_of(density_of(target_family(setting, 4)));
  CHECK(b2.x == doctest::Approx(b1.x).epsilon(1e-12));
  CHECK(b2.y == doctest::Approx(-b1.y).epsilon(1e-12));
  CHECK(b2.z == doctest::Approx(-b1.z).epsilon(1e-12));
  CHECK(b3.x == doctest::Approx(-b1.x).epsilon(1e-12));
  CHECK(b3.y == doctest::Approx(b1.y).epsilon(1e-12));
  CHECK(b3.z == doctest::Approx(-b1.z).epsilon(1e-12));
  CHECK(b4.x == doctest::Approx(-b1.x).epsilon(1e-12));
  CHECK(b4.y == doctest::Approx(-b1.y).epsilon(1e-12));
  CHECK(b4.z == doctest::Approx(b1.z).epsilon(1e-12));
}

TEST_CASE("outcome map is a stable bijection") {
  auto map = outcome_map();
  // Frozen assignment for the default circular convention.
  CHECK(map[static_cast<int>(BellOutcome::PhiPlus)] == 1);
  CHECK(map[static_cast<int>(BellOutcome::PhiMinus)] == 2);
  CHECK(map[static_cast<int>(BellOutcome::PsiPlus)] == 3);
  CHECK(map[static_cast<int>(BellOutcome::PsiMinus)] == 4);
  auto again = outcome_map();
  CHECK(map == again);

  // The opposite circular convention swaps the roles within each pair.
  auto flipped = outcome_map(BasisConvention{-1});
  CHECK(flipped[static_cast<int>(BellOutcome::PhiMinus)] == 1);
  CHECK(flipped[static_cast<int>(BellOutcome::PhiPlus)] == 2);
  CHECK(flipped[static_cast<int>(BellOutcome::PsiMinus)] == 3);
  CHECK(flipped[static_cast<int>(BellOutcome::PsiPlus)] == 4);

  int seen[5] = {0, 0, 0, 0, 0};
  for (BellOutcome o : kBellOutcomes) seen[map[static_cast<int>(o)]]++;
  for (int k = 1; k <= 4; ++k) CHECK(seen[k] == 1);
}

TEST_CASE("conditional states match the heralded family members") {
  auto map = outcome_map();
  for (const auto& setting : scan_grid()) {
    auto joint = joint_state(density_of(entangled_atom_photon()), spatial_encoding(setting));
    for (const auto& br : measure_bell(joint)) {
      REQUIRE(br.atom_state.has_value());
      const int k = map[static_cast<int>(br.outcome)];
      CHECK(fidelity_pure(target_family(setting, k), *br.atom_state) ==
            doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("pauli corrections restore the target on the full grid") {
  for (const auto& setting : scan_grid()) {
    auto joint = joint_state(density_of(entangled_atom_photon()), spatial_encoding(setting));
    auto target = target_state(setting);
    for (const auto& br : measure_bell(joint)) {
      REQUIRE(br.atom_state.has_value());
      const Mat u = pauli_correction(br.outcome).entries();
      DensityOperator corrected(u * br.atom_state->entries() * u.adjoint());
      CHECK(fidelity_pure(target, corrected) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(br.probability == doctest::Approx(0.25).epsilon(1e-9));
    }
  }
}

TEST_CASE("corrections are involutive unitaries") {
  for (BellOutcome o : kBellOutcomes) {
    const Mat u = pauli_correction(o).entries();
    CHECK((u * u.adjoint() - identity2()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u * u - identity2()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Default convention wiring: Phi+ needs no correction.
  CHECK((pauli_correction(BellOutcome::PhiPlus).entries() - identity2()).norm() < 1e-12);
  CHECK((pauli_correction(BellOutcome::PhiMinus).entries() - pauli_x()).norm() < 1e-12);
  CHECK((pauli_correction(BellOutcome::PsiPlus).entries() - pauli_y()).norm() < 1e-12);
  CHECK((pauli_correction(BellOutcome::PsiMinus).entries() - pauli_z()).norm() < 1e-12);
}

TEST_CASE("probability curves at alpha 90") {
  // Conditional-state populations for the branch heralding family member 1.
  auto map = outcome_map();
  BellOutcome herald_one = kBellOutcomes[0];
  for (BellOutcome o : kBellOutcomes) {
    if (map[static_cast<int>(o)] == 1) herald_one = o;
  }
  const double r = 1.0 / std::sqrt(2.0);
  Vec up_z(2), up_x(2), up_y(2);
  up_z << 1.0, 0.0;
  up_x << r, r;
  up_y << r, r * kI;
  for (int i = 0; i < 12; ++i) {
    const double phi_deg = 30.0 * i;
    PhaseSetting setting(90.0, phi_deg);
    auto joint = joint_state(density_of(entangled_atom_photon()), spatial_encoding(setting));
    for (const auto& br : measure_bell(joint)) {
      if (br.outcome != herald_one) continue;
      REQUIRE(br.atom_state.has_value());
      const double phi = setting.phi_rad();
      const double pz = fidelity_pure(StateVector(up_z, "z"), *br.atom_state);
      const double px = fidelity_pure(StateVector(up_x, "z"), *br.atom_state);
      const double py = fidelity_pure(StateVector(up_y, "z"), *br.atom_state);
      const double cz = std::cos(0.5 * (phi + 0.5 * kPi));
      const double cy = std::cos(0.5 * phi);
      CHECK(pz == doctest::Approx(cz * cz).epsilon(1e-9));
      CHECK(px == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(py == doctest::Approx(cy * cy).epsilon(1e-9));
    }
  }
}

TEST_CASE("branch probabilities are insensitive to atomic corrections") {
  PhaseSetting setting(147.0, 59.0);
  auto joint = joint_state(density_of(entangled_atom_photon()), spatial_encoding(setting));
  auto branches = measure_bell(joint);
  double total = 0.0;
  for (const auto& br : branches) total += br.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
