#include <doctest.h>

#include "qfb/config.hpp"
#include "qfb/measures.hpp"

using namespace qfb;

TEST_SUITE("config") {

TEST_CASE("minimal document gets the documented defaults") {
    const ExperimentSpec spec = parse_config("command = dark-basis\nN = 4\n");
    CHECK(spec.command == "dark-basis");
    CHECK(spec.sim.n_qubits == 4);
    CHECK(spec.sim.omega == 1.0);
    CHECK(spec.sim.gamma_collective == 1.0);
    REQUIRE(spec.sim.gamma_spont.size() == 1);
    CHECK(spec.sim.gamma_spont[0] == 1e-3);
    CHECK(spec.sim.tolerance == 1e-8);
    CHECK(spec.sim.seed == 42);
}

TEST_CASE("comments, blank lines, inline comments") {
    const std::string text =
        "# full line comment\n"
        "command = evolve   # trailing comment\n"
        "\n"
        "N = 2\n"
        "T = 12.5\n";
    const ExperimentSpec spec = parse_config(text);
    CHECK(spec.command == "evolve");
    CHECK(spec.sim.t_final == 12.5);
}

TEST_CASE("range values expand to inclusive grids") {
    const ExperimentSpec spec =
        parse_config("command = scan-A\nN = 4\nA_grid = 0:0.1:6.4\ngamma = 1e-3\n");
    CHECK(spec.a_grid.values().size() == 65);
    CHECK(spec.a_grid.values().front() == 0.0);
    CHECK(spec.a_grid.values().back() == doctest::Approx(6.4));

    CHECK_THROWS_AS(parse_config("command = scan-A\nN = 4\nA_grid = 1:0:2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = scan-A\nN = 4\nA_grid = 2:0.1:1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = scan-A\nN = 4\nA_grid = 1:2\n"), ConfigError);
}

TEST_CASE("unknown keys and malformed lines fail loudly with the key name") {
    CHECK_THROWS_WITH_AS(parse_config("command = evolve\nN = 4\nfrobnicate = 1\n"),
                         doctest::Contains("frobnicate"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = evolve\nN 4\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("command = evolve\nN = four\n"), doctest::Contains("N"),
                         ConfigError);
    CHECK_THROWS_AS(parse_config("N = 4\n"), ConfigError);                  // missing command
    CHECK_THROWS_AS(parse_config("command = evolve\nN = 4\nN = 2\n"), ConfigError);  // duplicate
}

TEST_CASE("cross-field validation names the problem") {
    CHECK_THROWS_WITH_AS(parse_config("command = evolve\nN = 3\nfeedback = epsilon_pair\n"),
                         doctest::Contains("requires N=4"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = scan-A\nN = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = concurrence-range\nN = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = evolve\nN = 3\na = 1,2\nfeedback = local_drive\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("command = evolve\nN = 2\ntarget = psi_t\n"), ConfigError);
}

TEST_CASE("resolved text round-trips to an identical spec") {
    const ExperimentSpec spec = parse_config(
        "command = scan-A-eps\nN = 4\nOmega = 0.75\ngamma = 0.002\nseed = 7\n"
        "A_grid = 0.5:0.25:2\neps_grid = 0:0.1:0.3\nfeedback = epsilon_pair\nA = 1.1\neps = 0.2\n");
    const ExperimentSpec again = parse_config(spec.resolved_text());
    CHECK(again.command == spec.command);
    CHECK(again.sim.omega == spec.sim.omega);
    CHECK(again.sim.seed == spec.sim.seed);
    CHECK(again.a_grid.values() == spec.a_grid.values());
    CHECK(again.eps_grid.values() == spec.eps_grid.values());
    CHECK(again.feedback_amplitude == spec.feedback_amplitude);
    CHECK(again.resolved_text() == spec.resolved_text());
}

TEST_CASE("target resolution and feedback construction") {
    ExperimentSpec spec = parse_config("command = evolve\nN = 4\n");
    auto t = resolve_target(spec);
    REQUIRE(t.has_value());
    CHECK(overlap(*t, singlet_state(2.0, -1.0, 0.0, 0.0)) == doctest::Approx(1.0));

    spec = parse_config("command = evolve\nN = 2\n");
    t = resolve_target(spec);
    REQUIRE(t.has_value());
    CHECK(t->n_qubits == 2);

    spec = parse_config("command = evolve\nN = 3\n");
    CHECK_FALSE(resolve_target(spec).has_value());

    spec = parse_config("command = evolve\nN = 4\nfeedback = epsilon_pair\nA = 0.9\neps = 0.1\n");
    const FeedbackScheme fb = build_feedback(spec);
    CHECK(fb.kind == FeedbackKind::epsilon_pair);
    CHECK(is_unitary(fb.unitary, 1e-10));

    spec = parse_config("command = evolve\nN = 4\nfeedback = schematic_one_way\n");
    CHECK(build_feedback(spec).kind == FeedbackKind::schematic_one_way);

    spec = parse_config("command = evolve\nN = 3\nfeedback = local_drive\n");
    CHECK_THROWS_AS(build_feedback(spec), ConfigError);
}

}  // TEST_SUITE
