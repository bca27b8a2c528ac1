#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "densecode/concentration.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace densecode;
namespace conc = densecode::concentration;

TEST_CASE("beta term values") {
    CHECK(conc::beta_term(1, 16, 16) == doctest::Approx(1.0 / std::numbers::ln2).epsilon(1e-9));
    CHECK(conc::beta_term(1, 16, 16) == doctest::Approx(1.442695).epsilon(1e-6));
    // r = 2, d_A = 2 d_B
    CHECK(conc::beta_term(2, 16, 8) == doctest::Approx(1.0 / (4.0 * std::numbers::ln2)).epsilon(1e-9));
    CHECK(conc::beta_term(2, 16, 8) == doctest::Approx(0.360674).epsilon(1e-6));

    double prev = conc::beta_term(1, 16, 8);
    for (int r = 2; r <= 64; r *= 2) {
        const double next = conc::beta_term(r, 16, 8);
        CHECK(next < prev);
        prev = next;
    }
    CHECK_THROWS_AS(conc::beta_term(0, 4, 4), std::invalid_argument);
}

TEST_CASE("exponent constant is (8 pi^2 ln 2)^-1") {
    const double direct = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * std::numbers::ln2);
    CHECK(conc::exponent_constant() == doctest::Approx(direct).epsilon(1e-12));
    CHECK(conc::exponent_constant() == doctest::Approx(0.018271946).epsilon(1e-7));
}

TEST_CASE("tail bound forms and monotonicity") {
    auto b = conc::tail_bound(1, 16, 16, 2.0);
    // rank-one form at these parameters: 2^(-255 * 4 * C / 16)
    const double exponent = 255.0 * 4.0 * conc::exponent_constant() / 16.0;
    CHECK(exponent == doctest::Approx(1.165).epsilon(1e-3));
    CHECK(b.rank_one_form == doctest::Approx(std::exp2(-exponent)).epsilon(1e-12));

    // statement and derivation forms differ by the factor 4 in the exponent
    CHECK(b.statement_form < b.derivation_form);
    CHECK(std::log2(12.0) - std::log2(b.statement_form) ==
          doctest::Approx(4.0 * (std::log2(12.0) - std::log2(b.derivation_form))).epsilon(1e-9));

    // decreasing in alpha and in d_A * d_B
    CHECK(conc::tail_bound(1, 16, 16, 2.5).statement_form < b.statement_form);
    CHECK(conc::tail_bound(1, 32, 16, 2.0).statement_form < b.statement_form);
    CHECK(std::isnan(conc::tail_bound(2, 16, 16, 2.0).rank_one_form));

    CHECK_THROWS_AS(conc::tail_bound(1, 4, 4, 0.0), std::invalid_argument);
}

TEST_CASE("full-rank states give exactly zero deficit") {
    conc::ConcentrationConfig cfg;
    cfg.r = 12;
    cfg.d_A = 4;
    cfg.d_B = 3;
    cfg.alpha = 0.1;
    cfg.trials = 10;
    cfg.seed = {30, 0};
    auto report = conc::sample_entropy_deficits(cfg);
    CHECK(report.violation_count == 0);
    for (double d : report.deficits) {
        CHECK(std::abs(d) < 1e-9);
    }
}

TEST_CASE("deficits are nonnegative and the violation count is consistent") {
    conc::ConcentrationConfig cfg;
    cfg.r = 2;
    cfg.d_A = 8;
    cfg.d_B = 4;
    cfg.alpha = 0.05;
    cfg.trials = 200;
    cfg.seed = {31, 0};
    auto report = conc::sample_entropy_deficits(cfg);

    int recount = 0;
    for (double d : report.deficits) {
        CHECK(d >= -1e-9);
        if (d > report.threshold) ++recount;
    }
    CHECK(recount == report.violation_count);
    CHECK(report.threshold == doctest::Approx(cfg.alpha + conc::beta_term(2, 8, 4)).epsilon(1e-12));
}

TEST_CASE("rank-one concentration at dims (64, 8)") {
    conc::ConcentrationConfig cfg;
    cfg.r = 1;
    cfg.d_A = 64;
    cfg.d_B = 8;
    cfg.alpha = 0.5;
    cfg.trials = 500;
    cfg.seed = {32, 0};
    cfg.jobs = 4;
    auto report = conc::sample_entropy_deficits(cfg);
    CHECK(report.violation_count == 0);
    CHECK(std::abs(report.mean_deficit - 0.090) < 0.03);
    const double page = 3.0 - oracle::page_mean_entropy_bits(8, 64);
    CHECK(std::abs(report.mean_deficit - page) < 0.02);

    int hist_total = 0;
    for (const auto& [bin, count] : report.histogram) hist_total += count;
    CHECK(hist_total == cfg.trials);
}

TEST_CASE("mean deficit decreases as the rank grows") {
    auto mean_at = [](int r) {
        conc::ConcentrationConfig cfg;
        cfg.r = r;
        cfg.d_A = 8;
        cfg.d_B = 4;
        cfg.alpha = 0.25;
        cfg.trials = 300;
        cfg.seed = {33, static_cast<std::uint64_t>(r)};
        return conc::sample_entropy_deficits(cfg).mean_deficit;
    };
    const double m1 = mean_at(1);
    const double m8 = mean_at(8);
    const double m32 = mean_at(32);
    CHECK(m1 > m8);
    CHECK(m8 > m32);
}

TEST_CASE("config validation") {
    conc::ConcentrationConfig cfg;
    cfg.r = 1;
    cfg.d_A = 2;
    cfg.d_B = 4;  // d_B > d_A
    cfg.alpha = 0.1;
    cfg.trials = 1;
    CHECK_THROWS_AS(conc::sample_entropy_deficits(cfg), std::invalid_argument);

    cfg.d_A = 4;
    cfg.d_B = 4;
    cfg.r = 17;  // above d_A d_B
    CHECK_THROWS_AS(conc::sample_entropy_deficits(cfg), std::invalid_argument);
}

TEST_CASE("cyclic decomposition reconstructs the support projector") {
    CHECK(conc::cyclic_decomposition_check(1, HilbertSpace({2, 2}), {34, 0}) < 1e-10);
    CHECK(conc::cyclic_decomposition_check(2, HilbertSpace({2, 2}), {34, 1}) < 1e-8);
    CHECK(conc::cyclic_decomposition_check(3, HilbertSpace({3, 3}), {34, 2}) < 1e-8);
    CHECK_THROWS_AS(conc::cyclic_decomposition_check(5, HilbertSpace({2, 2}), {34, 3}), std::invalid_argument);
}

TEST_CASE("parallel and serial sampling agree bit for bit") {
    conc::ConcentrationConfig cfg;
    cfg.r = 1;
    cfg.d_A = 8;
    cfg.d_B = 4;
    cfg.alpha = 0.3;
    cfg.trials = 64;
    cfg.seed = {35, 0};
    cfg.jobs = 1;
    auto serial = conc::sample_entropy_deficits(cfg);
    cfg.jobs = 7;
    auto parallel = conc::sample_entropy_deficits(cfg);
    REQUIRE(serial.deficits.size() == parallel.deficits.size());
    for (std::size_t i = 0; i < serial.deficits.size(); ++i) {
        CHECK(serial.deficits[i] == parallel.deficits[i]);
    }
}
