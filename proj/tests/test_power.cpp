#include "doctest.h"
#include "pkgc/domain.hpp"
#include "pkgc/power_model.hpp"

using namespace pkgc;

TEST_CASE("state depth orders") {
  CHECK(depth(CoreCState::CC0) < depth(CoreCState::CC1));
  CHECK(depth(CoreCState::CC1) < depth(CoreCState::CC1E));
  CHECK(depth(CoreCState::CC1E) < depth(CoreCState::CC6));
  const CoreCState all[] = {CoreCState::CC0, CoreCState::CC1, CoreCState::CC1E, CoreCState::CC6};
  for (auto a : all) {
    for (auto b : all) {
      // antisymmetric and total
      CHECK((deeper_or_equal(a, b) || deeper_or_equal(b, a)));
      if (a != b) CHECK(deeper_or_equal(a, b) != deeper_or_equal(b, a));
    }
    CHECK(at_least_cc1(a) == (a != CoreCState::CC0));
  }
  CHECK(io_power_rank(IoLState::L0) > io_power_rank(IoLState::L0p));
  CHECK(io_power_rank(IoLState::L0p) > io_power_rank(IoLState::L0s));
  CHECK(io_power_rank(IoLState::L0s) > io_power_rank(IoLState::L1));
  CHECK(io_power_rank(IoLState::L1) >= io_power_rank(IoLState::NDA));
  CHECK(in_l0s_or_deeper(IoLState::NDA));
  CHECK_FALSE(in_l0s_or_deeper(IoLState::L0));
}

TEST_CASE("state names round-trip") {
  for (auto s : {CoreCState::CC0, CoreCState::CC1, CoreCState::CC1E, CoreCState::CC6}) {
    CHECK(parse_core_cstate(to_string(s)) == s);
  }
  CHECK_FALSE(parse_core_cstate("CC3").has_value());
  for (auto s : {PackageState::PC0, PackageState::PC0_idle, PackageState::PC2, PackageState::PC6,
                 PackageState::ACC1, PackageState::PC1A}) {
    CHECK(parse_package_state(to_string(s)) == s);
  }
}

TEST_CASE("validate_profile") {
  SUBCASE("defaults and table values are valid") {
    CHECK(validate_profile(PowerProfile::skx_default()).ok());
    CHECK(validate_profile(PowerProfile::table1()).ok());
    CHECK(PowerProfile::table1().pc0_idle_total() == doctest::Approx(49.5));
    CHECK(PowerProfile::table1().pc1a_total() == doctest::Approx(29.1));
  }
  SUBCASE("PC1A below PC6 breaks ordering") {
    PowerProfile p;
    p.p_pc1a_soc = 5.0;
    CHECK(validate_profile(p).has("ordering"));
  }
  SUBCASE("all zero is degenerate but valid") {
    PowerProfile p;
    p.p_pc0_max = p.p_pc0_idle_soc = p.p_pc0_idle_dram = p.p_pc6_soc = p.p_pc6_dram = 0;
    p.p_cores_diff = p.p_ios_diff = p.p_dram_diff = p.p_pll_each = 0;
    p.n_plls_awake = 0;
    p.p_pc1a_soc = p.p_pc1a_dram = 0;
    CHECK(validate_profile(p).ok());
  }
  SUBCASE("negative and inconsistent fields") {
    PowerProfile p;
    p.p_ios_diff = -1.0;
    CHECK(validate_profile(p).has("nonnegative"));
    PowerProfile q;
    q.p_pc1a_dram = 3.0;
    CHECK(validate_profile(q).has("composition"));
  }
}

TEST_CASE("latency profile validation") {
  CHECK(validate_latency_profile(LatencyProfile{}).ok());
  LatencyProfile p;
  p.v_retention_mv = p.v_nominal_mv;
  CHECK(validate_latency_profile(p).has("voltage_order"));
  p = {};
  p.pmu_clock_hz = 0;
  CHECK(validate_latency_profile(p).has("pmu_clock"));
  p = {};
  p.cke_exit_ns = -1;
  CHECK(validate_latency_profile(p).has("nonnegative_latency"));
}

TEST_CASE("cycle rounding") {
  CHECK(cycles_to_ns(2, 500e6) == 4);
  CHECK(cycles_to_ns(3, 400e6) == 8);  // 7.5 rounds up
  CHECK(cycles_to_ns(0, 500e6) == 0);
  CHECK(ceil_ns(16.0) == 16);
  CHECK(ceil_ns(16.0000000000001) == 16);
  CHECK(ceil_ns(16.1) == 17);
}

TEST_CASE("baseline_power") {
  const PowerProfile prof = PowerProfile::table1();
  CHECK(baseline_power({0.0, 1.0, {}, {}}, prof, 92.0) == doctest::Approx(49.5));
  CHECK(baseline_power({1.0, 0.0, {}, {}}, prof, 92.0) == doctest::Approx(92.0));
  CHECK(baseline_power({0.5, 0.5, {}, {}}, prof, 92.0) == doctest::Approx(70.75));
  CHECK_THROWS_AS(baseline_power({0.5, 0.6, {}, {}}, prof, 92.0), InvalidResidency);
}

TEST_CASE("pc1a_savings") {
  const PowerProfile prof = PowerProfile::table1();
  SUBCASE("full idle") {
    const double s = pc1a_savings({0.0, 1.0, 1.0, {}}, prof, 92.0);
    CHECK(s == doctest::Approx(1.0 - 29.1 / 49.5));
    CHECK(s == doctest::Approx(0.412).epsilon(0.001));
    CHECK(s == 1.0 - prof.pc1a_total() / prof.pc0_idle_total());
  }
  SUBCASE("half idle, arithmetic oracle") {
    CHECK(pc1a_savings({0.5, 0.5, 0.5, {}}, prof, 92.0) == doctest::Approx(0.5 * 20.4 / 70.75));
    CHECK(pc1a_savings({0.5, 0.5, 0.5, {}}, prof, 92.0) == doctest::Approx(0.1442).epsilon(1e-3));
  }
  SUBCASE("no residency") { CHECK(pc1a_savings({0.5, 0.5, 0.0, {}}, prof, 92.0) == 0.0); }
  SUBCASE("r_pc1a defaults to idle residency") {
    CHECK(pc1a_savings({0.3, 0.7, {}, {}}, prof, 60.0) == pc1a_savings({0.3, 0.7, 0.7, {}}, prof, 60.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(pc1a_savings({0.5, 0.5, 0.6, {}}, prof, 92.0), InvalidResidency);
    PowerProfile zero = prof;
    zero.p_pc0_idle_soc = zero.p_pc0_idle_dram = 0.0;
    CHECK_THROWS_AS(pc1a_savings({1.0, 0.0, 0.0, {}}, zero, 0.0), DegenerateBaseline);
  }
  SUBCASE("monotone in residency") {
    double prev = -1.0;
    for (int i = 0; i <= 10; ++i) {
      const double r = i / 10.0;
      const double s = pc1a_savings({1.0 - r, r, r, {}}, prof, 70.0);
      CHECK(s >= prev);
      prev = s;
    }
  }
  SUBCASE("monotone in the idle-to-PC1A gap") {
    PowerProfile lower = prof;
    lower.p_pc1a_soc = 20.0;
    lower.p_cores_diff = 20.0 - lower.p_pc6_soc - lower.p_ios_diff - lower.n_plls_awake * lower.p_pll_each;
    CHECK(pc1a_savings({0.4, 0.6, 0.6, {}}, lower, 70.0) > pc1a_savings({0.4, 0.6, 0.6, {}}, prof, 70.0));
  }
  SUBCASE("scale invariance") {
    const double k = 3.7;
    PowerProfile scaled = prof;
    for (double* w : {&scaled.p_pc0_max, &scaled.p_pc0_idle_soc, &scaled.p_pc0_idle_dram, &scaled.p_pc6_soc,
                      &scaled.p_pc6_dram, &scaled.p_cores_diff, &scaled.p_ios_diff, &scaled.p_dram_diff,
                      &scaled.p_pll_each, &scaled.p_pc1a_soc, &scaled.p_pc1a_dram}) {
      *w *= k;
    }
    CHECK(pc1a_savings({0.25, 0.75, 0.75, {}}, scaled, 80.0 * k) ==
          doctest::Approx(pc1a_savings({0.25, 0.75, 0.75, {}}, prof, 80.0)).epsilon(1e-12));
  }
}

TEST_CASE("compose_pc1a_power") {
  const Pc1aPower p = compose_pc1a_power(PowerProfile::skx_default());
  CHECK(p.soc == doctest::Approx(27.556));
  CHECK(p.dram == doctest::Approx(1.61));
  CHECK(table_precision(p.soc) == doctest::Approx(27.5));
  CHECK(table_precision(p.dram) == doctest::Approx(1.6));
  CHECK(p.soc == PowerProfile::skx_default().p_pc1a_soc);
  CHECK(p.dram == PowerProfile::skx_default().p_pc1a_dram);

  PowerProfile zero = PowerProfile::skx_default();
  zero.p_cores_diff = zero.p_ios_diff = zero.p_dram_diff = 0.0;
  zero.n_plls_awake = 0;
  const Pc1aPower z = compose_pc1a_power(zero);
  CHECK(z.soc == zero.p_pc6_soc);
  CHECK(z.dram == zero.p_pc6_dram);

  // Ordering holds for the composed levels.
  CHECK(validate_profile(with_composed_pc1a(PowerProfile::table1())).ok());
}

TEST_CASE("pll_power") {
  CHECK(pll_power(8, 0.007) == doctest::Approx(0.056));
  CHECK(pll_power(0, 0.007) == 0.0);
  CHECK(pll_power(18, 0.007) == doctest::Approx(0.126));
  CHECK_THROWS(pll_power(-1, 0.007));
}
