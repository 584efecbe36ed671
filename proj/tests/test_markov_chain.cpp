#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "battmdp/markov_chain.hpp"

using namespace battmdp;

namespace {

// 9x9 chain with heavy diagonal and the published mid-row pattern; rows are
// exactly stochastic so it can drive sampling tests.
TransitionMatrix reference_quantile_matrix() {
    TransitionMatrix m = TransitionMatrix::zero(9);
    const double row4[9] = {0.01, 0.08, 0.21, 0.31, 0.19, 0.08, 0.07, 0.03, 0.02};
    for (int c = 0; c < 9; ++c) m.at(3, c) = row4[c];
    for (int r = 0; r < 9; ++r) {
        if (r == 3) continue;
        for (int c = 0; c < 9; ++c) {
            m.at(r, c) = r == c ? 0.6 : 0.05;
        }
    }
    m.validate_stochastic(1e-12);
    return m;
}

std::vector<int> sample_chain(const TransitionMatrix& m, int length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<int> seq(length);
    int state = 1;
    for (int t = 0; t < length; ++t) {
        seq[t] = state;
        const double draw = uniform(rng);
        double cum = 0.0;
        int next = m.dim;
        for (int c = 0; c < m.dim; ++c) {
            cum += m.at(state - 1, c);
            if (draw <= cum) {
                next = c + 1;
                break;
            }
        }
        state = std::min(next, m.dim);
    }
    return seq;
}

}  // namespace

TEST_SUITE("markov_chain") {

TEST_CASE("stochastic validation") {
    TransitionMatrix bad = TransitionMatrix::identity(3);
    bad.at(0, 0) = 0.5;
    CHECK_THROWS(bad.validate_stochastic());
    CHECK_NOTHROW(TransitionMatrix::identity(5).validate_stochastic());
}

TEST_CASE("constant sequence gives self-loops everywhere") {
    const std::vector<int> seq(400, 3);
    const TransitionMatrix m = estimate_demand_transitions(seq);
    m.validate_stochastic(1e-12);
    for (int r = 0; r < 9; ++r) CHECK(m.at(r, r) == 1.0);
    CHECK_THROWS(estimate_demand_transitions(std::vector<int>{1}));
    CHECK_THROWS(estimate_demand_transitions(std::vector<int>{1, 10}));
}

TEST_CASE("planted matrix is recovered from a long sample") {
    const TransitionMatrix truth = reference_quantile_matrix();
    const std::vector<int> seq = sample_chain(truth, 50000, 42);
    const TransitionMatrix est = estimate_demand_transitions(seq);
    est.validate_stochastic(1e-12);
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 9; ++c) {
            CHECK(std::abs(est.at(r, c) - truth.at(r, c)) <= 0.02);
        }
    }
    // the diagonal-plus-neighbours mass is high by construction
    for (int r = 0; r < 9; ++r) {
        double near = est.at(r, r);
        if (r > 0) near += est.at(r, r - 1);
        if (r < 8) near += est.at(r, r + 1);
        CHECK(near >= 0.60);
    }
}

TEST_CASE("shorter samples recover within a wider band") {
    const TransitionMatrix truth = reference_quantile_matrix();
    int ok_trials = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TransitionMatrix est =
            estimate_demand_transitions(sample_chain(truth, 10000, 1000 + seed));
        double worst = 0.0;
        for (int r = 0; r < 9; ++r) {
            for (int c = 0; c < 9; ++c) {
                worst = std::max(worst, std::abs(est.at(r, c) - truth.at(r, c)));
            }
        }
        ok_trials += worst <= 0.05;
    }
    CHECK(ok_trials >= 19);
}

TEST_CASE("time chain is the daily cycle") {
    const TransitionMatrix t = time_transition();
    t.validate_stochastic(1e-12);
    CHECK(t.at(0, 1) == 1.0);   // hour 1 -> hour 2
    CHECK(t.at(23, 0) == 1.0);  // hour 24 wraps to hour 1

    // 24th power is the identity
    TransitionMatrix power = TransitionMatrix::identity(24);
    for (int step = 0; step < 24; ++step) {
        TransitionMatrix next = TransitionMatrix::zero(24);
        for (int r = 0; r < 24; ++r) {
            for (int k = 0; k < 24; ++k) {
                if (power.at(r, k) == 0.0) continue;
                for (int c = 0; c < 24; ++c) next.at(r, c) += power.at(r, k) * t.at(k, c);
            }
        }
        power = next;
    }
    for (int r = 0; r < 24; ++r) {
        for (int c = 0; c < 24; ++c) CHECK(power.at(r, c) == (r == c ? 1.0 : 0.0));
    }
}

TEST_CASE("soc chain for a small discharge") {
    const SocTransition t = soc_transition(9);  // u = -0.1
    t.matrix.validate_stochastic(1e-12);
    CHECK(t.matrix.at(1, 0) == 1.0);  // 10% -> 0%
    CHECK(t.infeasible[1] == 0);
    CHECK(t.matrix.at(0, 0) == 1.0);  // empty battery stays empty
    CHECK(t.infeasible[0] == 1);      // but the move was clamped
    for (int j = 2; j <= 10; ++j) {
        CHECK(t.matrix.at(j, j - 1) == 1.0);
        CHECK(t.infeasible[j] == 0);
    }
}

TEST_CASE("no-op action is the identity with no flags") {
    const SocTransition t = soc_transition(11);
    for (int j = 0; j <= 10; ++j) {
        CHECK(t.matrix.at(j, j) == 1.0);
        CHECK(t.infeasible[j] == 0);
    }
}

TEST_CASE("full charge maps every level to the top") {
    const SocTransition t = soc_transition(21);  // u = +1
    for (int j = 0; j <= 10; ++j) {
        CHECK(t.matrix.at(j, 10) == 1.0);
        CHECK(t.infeasible[j] == (j > 0 ? 1 : 0));  // only 0% -> 100% is exact
    }
    CHECK_THROWS(soc_transition(0));
    CHECK_THROWS(soc_transition(22));
}

TEST_CASE("charge/discharge symmetry on interior states") {
    for (int k = 1; k <= 21; ++k) {
        const SocTransition a = soc_transition(k);
        const SocTransition b = soc_transition(22 - k);
        const int step = k - 11;
        for (int j = 0; j <= 10; ++j) {
            const int target = j + step;
            if (target < 0 || target > 10) continue;     // clamped on one side
            if (target - step < 0 || target - step > 10) continue;
            // unclamped moves mirror: a: j -> target implies b: target -> j
            CHECK(a.matrix.at(j, target) == 1.0);
            CHECK(b.matrix.at(target, j) == 1.0);
        }
    }
}

TEST_CASE("peak threshold bookkeeping") {
    const PeakThresholds t = PeakThresholds::uniform(6);
    REQUIRE(t.count() == 6);
    CHECK(t.boundaries == std::vector<double>{100.0, 200.0, 300.0, 400.0, 500.0});
    CHECK(t.representative(1) == 0.0);
    CHECK(t.representative(2) == 100.0);
    CHECK(t.representative(6) == 500.0);
    CHECK(t.threshold_index(50.0) == 1);
    CHECK(t.threshold_index(100.0) == 2);  // boundary belongs upward
    CHECK(t.threshold_index(250.0) == 3);
    CHECK(t.threshold_index(9000.0) == 6);

    CHECK(PeakThresholds::uniform(11).boundaries.front() == doctest::Approx(50.0));
    CHECK(PeakThresholds::uniform(21).boundaries.front() == doctest::Approx(25.0));

    // the max keeps the larger of the running peak and this hour's demand
    CHECK(peak_destination(5, 150.0, t) == 5);  // representative 400 dominates
    CHECK(peak_destination(1, 250.0, t) == 3);
    CHECK(peak_destination(3, 250.0, t) == 3);
}

TEST_CASE("peak transition resets at the last hour of the day") {
    const PeakThresholds thresholds = PeakThresholds::uniform(6);
    QuantileSet qset;
    for (int q = 1; q <= 9; ++q) {
        QuantileModel m;
        m.beta = q / 10.0;
        m.mu = 50.0 * q;
        qset.models.push_back(m);
    }
    const DemandTable demand = build_demand_table(qset);
    const std::array<double, 21> energy{};  // inert battery

    const TransitionMatrix mid = peak_transition(10, 5, 11, thresholds, demand, energy);
    mid.validate_stochastic(1e-12);
    CHECK(mid.at(0, thresholds.threshold_index(250.0) - 1) == 1.0);  // e_g = 250 from r=1

    const TransitionMatrix last = peak_transition(24, 5, 11, thresholds, demand, energy);
    for (int r = 0; r < 6; ++r) CHECK(last.at(r, 0) == 1.0);
}

TEST_CASE("composed joint rows are stochastic and sparse") {
    const TransitionMatrix demand = reference_quantile_matrix();
    const JointTransition jt = compose_basic(time_transition(), soc_transition(11), demand);
    CHECK(jt.space.n_states() == 24 * 11 * 9);
    for (std::int64_t s = 0; s < jt.space.n_states(); ++s) {
        const auto probs = jt.probs(s);
        CHECK(probs.size() <= 9);
        double sum = 0.0;
        for (double p : probs) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("joint entry equals the quantile factor when time and soc are fixed") {
    const TransitionMatrix demand = reference_quantile_matrix();
    const JointTransition jt = compose_basic(time_transition(), soc_transition(11), demand);
    // from (i=3, j=5, q=4) under the no-op action to (4, 5, 5)
    const auto s = jt.space.state_index(3, 5, 4);
    const auto target = jt.space.state_index(4, 5, 5);
    const auto dests = jt.dests(s);
    const auto probs = jt.probs(s);
    double found = -1.0;
    for (std::size_t d = 0; d < dests.size(); ++d) {
        if (dests[d] == target) found = probs[d];
    }
    CHECK(found == doctest::Approx(0.19));
}

TEST_CASE("fully deterministic factors give a single destination") {
    const TransitionMatrix demand = TransitionMatrix::identity(9);
    const JointTransition jt = compose_basic(time_transition(), soc_transition(13), demand);
    for (std::int64_t s = 0; s < jt.space.n_states(); ++s) {
        CHECK(jt.dests(s).size() == 1);
        CHECK(jt.probs(s)[0] == 1.0);
    }
}

TEST_CASE("peak chain with one threshold reduces to the basic chain") {
    const TransitionMatrix demand = reference_quantile_matrix();
    QuantileSet qset;
    for (int q = 1; q <= 9; ++q) {
        QuantileModel m;
        m.beta = q / 10.0;
        m.mu = 30.0 * q;
        qset.models.push_back(m);
    }
    const DemandTable table = build_demand_table(qset);
    const std::array<double, 21> energy{};
    const PeakThresholds single{{}};  // R = 1

    const ComposedChain basic = build_basic_chain(demand);
    const ComposedChain peak = build_peak_chain(demand, single, table, energy);
    REQUIRE(peak.space.n_states() == basic.space.n_states());
    for (std::int64_t s = 0; s < basic.space.n_states(); ++s) {
        for (int k = 1; k <= 21; ++k) {
            const auto bd = basic.dests(s, k), pd = peak.dests(s, k);
            const auto bp = basic.probs(s, k), pp = peak.probs(s, k);
            REQUIRE(bd.size() == pd.size());
            for (std::size_t d = 0; d < bd.size(); ++d) {
                CHECK(bd[d] == pd[d]);
                CHECK(bp[d] == pp[d]);
            }
        }
    }
}

TEST_CASE("matrix csv dump") {
    const TransitionMatrix t = time_transition();
    const std::string path =
        (std::filesystem::temp_directory_path() / "battmdp_matrix.csv").string();
    write_matrix_csv(t, path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 24);
}

}  // TEST_SUITE
