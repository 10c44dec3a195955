// Copyright 2026 The rabisim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rabisim/core_model.hpp"
#include "rabisim/error.hpp"
#include "support.hpp"

using namespace rabisim;
using std::numbers::pi;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_SUITE("core_model") {
  TEST_CASE("coupling eta is g_eg g_em / delta") {
    CHECK(coupling_eta(1.0, 1.0, 1.0) == 1.0);
    CHECK(coupling_eta(2.0, 3.0, 4.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(throws_code(ErrorCode::Domain, [] { coupling_eta(1.0, 1.0, 0.0); }));
  }

  TEST_CASE("derived parameters keep eta consistent") {
    const auto p = PhysicalParams::from_couplings(110.0, 90.0, 2.0 * pi * 1500.0, 1e5);
    CHECK(std::abs(p.eta - 110.0 * 90.0 / (2.0 * pi * 1500.0)) <= 1e-12 * p.eta);
    CHECK(throws_code(ErrorCode::Domain, [] { PhysicalParams::from_couplings(1, 1, 0, 1); }));
    CHECK(throws_code(ErrorCode::Domain, [] { PhysicalParams::from_couplings(1, 1, 1, 0); }));
  }

  TEST_CASE("write gain is the modulus of eta times the write amplitude") {
    CHECK(write_gain_kappa(1.0, 0.0) == 0.0);
    CHECK(write_gain_kappa(0.5, 2.0) == 1.0);
    CHECK(write_gain_kappa(1.0, cplx(3.0, 4.0)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(write_gain_kappa(-2.0, cplx(0.0, 1.5)) == doctest::Approx(3.0).epsilon(1e-15));
  }

  TEST_CASE("spin wave from the write phase") {
    CHECK(spin_wave_from_write(1.0, 0.0, 7.0).excitations() == 0.0);
    const double sh1 = (std::exp(1.0) - std::exp(-1.0)) / 2.0;
    CHECK(spin_wave_from_write(1.0, 1.0, 1e6).excitations() ==
          doctest::Approx(sh1 * sh1).epsilon(1e-14));
    CHECK(spin_wave_from_write(1.0, 1.0, 1e6).excitations() == doctest::Approx(1.3811).epsilon(1e-4));
    CHECK(spin_wave_from_write(10.0, 2.0, 100.0).excitations() == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(spin_wave_from_write(2.0, 1.0, 1e6).value.imag() == 0.0);
    CHECK(spin_wave_from_write(2.0, 1.0, 1e6).value.real() > 0.0);
    CHECK(throws_code(ErrorCode::Domain, [] { spin_wave_from_write(1.0, -1.0, 10.0); }));
  }

  TEST_CASE("spin wave is monotone in duration and gain and never exceeds the cap") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const double n_atoms = std::pow(10.0, 6.0 * u(rng));
      const double k = 5.0 * u(rng), t = 3.0 * u(rng), dk = u(rng), dt = u(rng);
      const auto base = spin_wave_from_write(k, t, n_atoms);
      CHECK(spin_wave_from_write(k, t + dt, n_atoms).magnitude() >= base.magnitude());
      CHECK(spin_wave_from_write(k + dk, t, n_atoms).magnitude() >= base.magnitude());
      CHECK(base.magnitude() <= std::sqrt(n_atoms) * (1.0 + 1e-15));
    }
  }

  TEST_CASE("rabi frequency") {
    CHECK(rabi_frequency(1.0, SpinWaveAmplitude{2.0}) == 2.0);
    CHECK(rabi_frequency(3.7, SpinWaveAmplitude{}) == 0.0);
    const double sh1 = (std::exp(1.0) - std::exp(-1.0)) / 2.0;
    CHECK(rabi_frequency(0.3, spin_wave_from_write(1.0, 1.0, 1e6)) ==
          doctest::Approx(0.3 * sh1).epsilon(1e-14));
    CHECK(rabi_frequency(0.3, spin_wave_from_write(1.0, 1.0, 1e6)) ==
          doctest::Approx(0.3526).epsilon(1e-4));
  }

  TEST_CASE("conversion closed form against the matrix-exponential propagator") {
    auto full = conversion_closed_form(1.0, 0.0, pi / 2.0);
    CHECK(std::abs(full.a_p) < 1e-15);
    CHECK(std::abs(full.a_s - 1.0) < 1e-15);
    auto ident = conversion_closed_form(1.0, 0.0, 0.0);
    CHECK(ident.a_p == cplx(1.0, 0.0));
    CHECK(ident.a_s == cplx(0.0, 0.0));
    auto half = conversion_closed_form(1.0, 0.0, pi / 4.0);
    CHECK(std::abs(half.a_p - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(half.a_s - 1.0 / std::sqrt(2.0)) < 1e-15);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
      const cplx ap(u(rng), u(rng)), as(u(rng), u(rng));
      const double th = u(rng);
      const auto out = conversion_closed_form(ap, as, th);
      const auto ref = test::beam_splitter_oracle(ap, as, th);
      CHECK(std::abs(out.a_p - ref.first) < 1e-12);
      CHECK(std::abs(out.a_s - ref.second) < 1e-12);
    }
  }

  TEST_CASE("conversion conserves photon number and composes as a rotation") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
      const cplx ap(u(rng), u(rng)), as(u(rng), u(rng));
      const double t1 = u(rng), t2 = u(rng);
      const double n0 = std::norm(ap) + std::norm(as);
      const auto one = conversion_closed_form(ap, as, t1);
      CHECK(std::abs(std::norm(one.a_p) + std::norm(one.a_s) - n0) <= 1e-12 * n0);
      const auto two = conversion_closed_form(one.a_p, one.a_s, t2);
      const auto direct = conversion_closed_form(ap, as, t1 + t2);
      const double scale = std::sqrt(n0);
      CHECK(std::abs(two.a_p - direct.a_p) <= 1e-12 * scale);
      CHECK(std::abs(two.a_s - direct.a_s) <= 1e-12 * scale);
    }
  }

  TEST_CASE("single-photon splitting") {
    auto s0 = single_photon_output(0.0);
    CHECK(s0.c1 == cplx(0.0, 0.0));
    CHECK(s0.c2 == cplx(1.0, 0.0));
    auto s45 = single_photon_output(pi / 4.0);
    CHECK(std::abs(std::norm(s45.c1) - 0.5) <= 1e-12);
    CHECK(std::abs(std::norm(s45.c2) - 0.5) <= 1e-12);
    auto s90 = single_photon_output(pi / 2.0);
    CHECK(std::abs(s90.c1 - 1.0) < 1e-15);
    CHECK(std::abs(s90.c2) < 1e-15);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
      const double th = u(rng);
      const auto st = single_photon_output(th);
      CHECK(std::abs(st.norm() - 1.0) <= 1e-12);
      // The one-photon sector evolves exactly like the classical amplitudes.
      const auto ref = test::beam_splitter_oracle(1.0, 0.0, th);
      CHECK(std::abs(st.c1 - ref.second) <= 1e-12);
      CHECK(std::abs(st.c2 - ref.first) <= 1e-12);
    }
  }

  TEST_CASE("mixing angle with decaying Rabi frequency") {
    CHECK(mixing_angle_with_decay(1.0, 0.0, 2.0) == 2.0);
    CHECK(mixing_angle_with_decay(1.0, 1.0, 60.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mixing_angle_with_decay(2.0, 0.5, 1.0) ==
          doctest::Approx(4.0 * (1.0 - std::exp(-0.5))).epsilon(1e-14));
    CHECK(mixing_angle_with_decay(2.0, 0.5, 1.0) == doctest::Approx(1.5739).epsilon(1e-4));
    CHECK(throws_code(ErrorCode::Domain, [] { mixing_angle_with_decay(1.0, -0.1, 1.0); }));
    CHECK(throws_code(ErrorCode::Domain, [] { mixing_angle_with_decay(1.0, 0.1, -1.0); }));
  }

  TEST_CASE("mixing angle is monotone, bounded and continuous at the series switch") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const double om = 10.0 * u(rng), g = 2.0 * u(rng), t = 10.0 * u(rng);
      const double th = mixing_angle_with_decay(om, g, t);
      CHECK(mixing_angle_with_decay(om, g, t + u(rng)) >= th);
      if (g > 0.0) CHECK(th <= om / g * (1.0 + 1e-15));
    }
    // Small gamma t: the deviation from omega0 t is the leading term gamma t / 2.
    for (double x : {1e-12, 1e-10, 2e-9, 1e-8, 9.9e-7, 1e-6, 1.01e-6, 1e-5}) {
      const double th = mixing_angle_with_decay(3.0, x, 1.0);
      const double rel = (3.0 - th) / 3.0;
      CHECK(rel >= 0.0);
      CHECK(std::abs(rel - 0.5 * x) <= x * x / 6.0 * 1.01 + 1e-16);
      if (x <= 2e-9) CHECK(rel <= 1e-9);
    }
  }

  TEST_CASE("two-photon resonance") {
    CHECK(validate_resonance(ResonanceSpec{10.0, 4.0, 6.0, {}}, 0.0));
    CHECK_FALSE(validate_resonance(ResonanceSpec{10.0, 4.0, 5.0, {}}, 0.5));
    CHECK(validate_resonance(ResonanceSpec{10.0, 4.0, 5.9, {}}, 0.2));
    CHECK(throws_code(ErrorCode::Domain,
                      [] { validate_resonance(ResonanceSpec{1.0, 0.0, 1.0, {}}, -1.0); }));
  }

  TEST_CASE("rate set composes the closed forms") {
    const auto p = PhysicalParams::from_couplings(1.0, 0.5, 1.0, 1e9);
    const auto r = rates_for(p, cplx(0.0, 4.0), 1.5, 2.0);
    CHECK(r.kappa == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(r.omega_rabi == doctest::Approx(0.5 * std::sinh(3.0)).epsilon(1e-14));
    CHECK(r.theta == doctest::Approx(std::sinh(3.0)).epsilon(1e-14));
    CHECK(r.kappa >= 0.0);
  }
}
