#include <doctest.h>

#include <cmath>

#include "battmdp/battery_pricing.hpp"

using namespace battmdp;

namespace {

QuantileSet flat_quantiles(double base = 100.0, double step = 25.0) {
    QuantileSet qset;
    for (int q = 1; q <= 9; ++q) {
        QuantileModel m;
        m.beta = q / 10.0;
        m.mu = base + step * q;
        qset.models.push_back(m);
    }
    return qset;
}

const BatteryParams kBattery{500.0, 0.92, 1.0};

}  // namespace

TEST_SUITE("battery_pricing") {

TEST_CASE("cost cases") {
    const CostCase c1 = CostCase::from_id(1);
    CHECK(!c1.apply_losses);
    CHECK(c1.refund_exports);
    const CostCase c2 = CostCase::from_id(2);
    CHECK(c2.apply_losses);
    CHECK(c2.refund_exports);
    const CostCase c3 = CostCase::from_id(3);
    CHECK(c3.apply_losses);
    CHECK(!c3.refund_exports);
    CHECK_THROWS(CostCase::from_id(0));
}

TEST_CASE("battery energy with and without losses") {
    const CostCase lossy = CostCase::from_id(2);
    CHECK(battery_energy(1.0, kBattery, lossy) == doctest::Approx(543.478).epsilon(1e-5));
    CHECK(battery_energy(-1.0, kBattery, lossy) == doctest::Approx(-460.0).epsilon(1e-12));
    CHECK(battery_energy(0.0, kBattery, lossy) == 0.0);
    const CostCase ideal = CostCase::from_id(1);
    CHECK(battery_energy(0.3, kBattery, ideal) == doctest::Approx(150.0));
    CHECK(battery_energy(-0.3, kBattery, ideal) == doctest::Approx(-150.0));
    CHECK_THROWS(battery_energy(1.5, kBattery, lossy));
}

TEST_CASE("battery energy is monotone and dominates the lossless line") {
    const CostCase lossy = CostCase::from_id(2);
    double prev = -1e300;
    for (int k = 1; k <= 21; ++k) {
        const double u = (k - 11) / 10.0;
        const double e = battery_energy(u, kBattery, lossy);
        CHECK(e >= prev);
        prev = e;
        if (u != 0.0) CHECK(e > kBattery.capacity_kwh * u);
        else CHECK(e == 0.0);
    }
}

TEST_CASE("grid energy and storage step") {
    CHECK(grid_energy(300.0, -460.0) == doctest::Approx(-160.0));
    CHECK(grid_energy(300.0, 0.0) == 300.0);
    CHECK(grid_energy(0.0, 543.478) == doctest::Approx(543.478));
    CHECK(step_energy(250.0, 0.1, kBattery) == doctest::Approx(300.0));
    CHECK(step_energy(0.0, -0.1, kBattery) == doctest::Approx(-50.0));  // raw, uncorrected
    CHECK(step_energy(500.0, 0.0, kBattery) == 500.0);
}

TEST_CASE("hourly cost per policy") {
    const CostCase c2 = CostCase::from_id(2);
    const CostCase c3 = CostCase::from_id(3);

    const PricingPolicy c = PricingPolicy::energy_limit_c();
    CHECK(hourly_cost(250.0, 5, c, c2) == doctest::Approx(30.0));
    CHECK(hourly_cost(200.0, 5, c, c2) == doctest::Approx(10.0));  // boundary is the low tier
    CHECK(hourly_cost(-50.0, 5, c, c2) == doctest::Approx(-2.5)); // refund at the low rate
    CHECK(hourly_cost(-50.0, 5, c, c3) == 0.0);

    const PricingPolicy b = PricingPolicy::realtime_b_default();
    CHECK(hourly_cost(-100.0, 3, b, c3) == 0.0);
    CHECK(hourly_cost(100.0, 3, b, c2) ==
          doctest::Approx(100.0 * b.realtime_prices[2]));

    const PricingPolicy a = PricingPolicy::tou_a();
    CHECK(a.tou_schedule[8] == doctest::Approx(0.05));   // 08:00, off-peak
    CHECK(a.tou_schedule[15] == doctest::Approx(0.20));  // 15:00, peak
    CHECK(a.tou_schedule[22] == doctest::Approx(0.10));  // 22:00, shoulder
    CHECK(hourly_cost(100.0, 9, a, c2) == doctest::Approx(5.0));

    const PricingPolicy d = PricingPolicy::peak_d();
    CHECK(hourly_cost(100.0, 1, d, c2) == doctest::Approx(5.0));  // energy part only
}

TEST_CASE("policy C cost is linear on both sides of the limit") {
    const PricingPolicy c = PricingPolicy::energy_limit_c();
    const CostCase c2 = CostCase::from_id(2);
    for (double e = 150.0; e <= 199.9; e += 7.3) {
        CHECK(hourly_cost(e, 1, c, c2) == doctest::Approx(0.05 * e));
    }
    for (double e = 200.1; e <= 280.0; e += 7.3) {
        CHECK(hourly_cost(e, 1, c, c2) == doctest::Approx(0.12 * e));
    }
}

TEST_CASE("cost tensor shape and penalty placement") {
    const QuantileSet qset = flat_quantiles();
    const PricingPolicy policy = PricingPolicy::tou_a();
    const CostCase c2 = CostCase::from_id(2);
    const CostTensor tensor = build_cost_tensor(qset, kBattery, policy, c2);

    CHECK(tensor.values.size() == 24 * 11 * 9 * 21);
    CHECK(tensor.space.variable_count() == 49896);

    // the infeasible (j=0, k=9) entry exceeds the feasible (j=1, k=9) one by P
    const auto s0 = tensor.space.state_index(5, 0, 4);
    const auto s1 = tensor.space.state_index(5, 1, 4);
    CHECK(tensor.at(s0, 9) - tensor.at(s1, 9) == doctest::Approx(1000.0));

    // the no-op action is always feasible and costs price * load
    for (int i = 1; i <= 24; i += 5) {
        for (int q = 1; q <= 9; q += 3) {
            const double expected =
                policy.tou_schedule[i - 1] * evaluate(qset.models[q - 1], i - 1.0);
            for (int j = 0; j <= 10; j += 5) {
                CHECK(tensor.at(tensor.space.state_index(i, j, q), 11) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("penalty lands exactly on the flagged entries") {
    const QuantileSet qset = flat_quantiles();
    const PricingPolicy policy = PricingPolicy::energy_limit_c();
    const CostCase c2 = CostCase::from_id(2);
    const CostTensor tensor = build_cost_tensor(qset, kBattery, policy, c2);
    const DemandTable demand = build_demand_table(qset);
    const auto energy = action_energy_table(kBattery, c2);

    for (int k = 1; k <= 21; ++k) {
        const auto flags = soc_transition(k).infeasible;
        for (int i = 1; i <= 24; i += 7) {
            for (int q = 1; q <= 9; q += 4) {
                const double base =
                    hourly_cost(demand.at(i, q) + energy[k - 1], i, policy, c2);
                for (int j = 0; j <= 10; ++j) {
                    const double expected = base + (flags[j] ? 1000.0 : 0.0);
                    CHECK(tensor.at(tensor.space.state_index(i, j, q), k) ==
                          doctest::Approx(expected).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("peak tensor accrues the incremental threshold charge") {
    const QuantileSet qset = flat_quantiles(0.0, 30.0);  // demand 30..270 flat over hours
    const PricingPolicy policy = PricingPolicy::peak_d();
    const CostCase c2 = CostCase::from_id(2);
    const PeakThresholds thresholds = PeakThresholds::uniform(6);
    const CostTensor tensor = build_cost_tensor(qset, kBattery, policy, c2, &thresholds);

    CHECK(tensor.values.size() == 24 * 11 * 9 * 6 * 21);
    CHECK(tensor.space.variable_count() == 299376);

    // q=9 -> load 270; inert action from r=1 moves to r=3 (rep 200): accrual 7*200
    const auto s = tensor.space.state_index(2, 5, 9, 1);
    const double energy_part = 0.05 * 270.0;
    CHECK(tensor.at(s, 11) == doctest::Approx(energy_part + 7.0 * 200.0));

    // from r=3 (rep 200) the same hour accrues nothing further: 270 > 200 -> r'=3
    const auto s3 = tensor.space.state_index(2, 5, 9, 3);
    CHECK(tensor.at(s3, 11) == doctest::Approx(energy_part));

    // from r=6 (rep 500) nothing ever accrues
    const auto s6 = tensor.space.state_index(2, 5, 9, 6);
    CHECK(tensor.at(s6, 11) == doctest::Approx(energy_part));
}

TEST_CASE("pricing validation rejects negatives") {
    PricingPolicy bad = PricingPolicy::tou_a(-0.1, 0.2, 0.1);
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(PricingPolicy::energy_limit_c(0.0).validate());
    CHECK_NOTHROW(PricingPolicy::realtime_b_default().validate());
}

}  // TEST_SUITE
