#include <catch2/catch_amalgamated.hpp>

#include "qcorr/io.hpp"

using namespace qcorr;

TEST_CASE("state json round trip", "[io]") {
    DensityMatrix w = werner(0.37);
    json j = state_to_json(w);
    DensityMatrix back = state_from_json(j);
    CHECK(max_abs(w.mat - back.mat) < 1e-15);
    CHECK(back.dims == w.dims);

    save_text("/tmp/qcorr_test_state.json", j.dump(2));
    CHECK(max_abs(load_state("/tmp/qcorr_test_state.json").mat - w.mat) < 1e-15);

    DensityMatrix bell = bell_mixture(1.0);  // complex-free but rank-1
    CHECK(max_abs(state_from_json(state_to_json(bell)).mat - bell.mat) < 1e-15);

    // A state with genuinely complex entries survives the split-re/im format.
    std::mt19937_64 rng(3);
    DensityMatrix r = random_density_matrix(4, rng, {2, 2});
    CHECK(max_abs(state_from_json(state_to_json(r)).mat - r.mat) < 1e-15);
}

TEST_CASE("enveloped artifacts load through the same door", "[io]") {
    DensityMatrix w = werner(0.37);
    json j = state_to_json(w);
    Provenance p{{"qcorr", "ising-state"}, json::object(), 7, std::nullopt};
    json env = envelope(json{{"state", j}, {"note", "x"}}, p);
    save_text("/tmp/qcorr_test_env.json", env.dump(2));
    CHECK(max_abs(load_state("/tmp/qcorr_test_env.json").mat - w.mat) < 1e-15);

    json env2 = load_envelope("/tmp/qcorr_test_env.json");
    CHECK(env2.at("provenance").at("seed").get<int>() == 7);
    CHECK(env2.at("provenance").at("artifact").get<std::string>() == artifact_name);
    CHECK(env2.at("payload").contains("state"));

    // A bare state file is not an envelope.
    CHECK_THROWS_AS(load_envelope("/tmp/qcorr_test_state.json"), ParseError);
}

TEST_CASE("csv quoting round trip", "[io]") {
    CsvTable t;
    t.header = {"a", "b,c", "d\"e"};
    t.rows = {{"1.5", "x\ny", ""}, {format_double(-0.0), "plain", "q\"\"q"}};
    std::string s = to_csv(t);
    CsvTable u = parse_csv(s);
    CHECK(u.header == t.header);
    CHECK(u.rows == t.rows);

    CHECK_THROWS_AS(parse_csv("a,b\n\"unterminated"), ParseError);
}

TEST_CASE("deterministic number formatting", "[io]") {
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1e-300) == "1e-300");
    // 12 significant digits, stable across calls.
    CHECK(format_double(1.0 / 3.0) == format_double(1.0 / 3.0));
}

TEST_CASE("malformed inputs are rejected", "[io]") {
    CHECK_THROWS_AS(state_from_json(json{{"dims", {2, 2}}}), ParseError);
    CHECK_THROWS_AS(state_from_json(json::array()), ParseError);
    CHECK_THROWS_AS(load_json_file("/tmp/qcorr_no_such_file.json"), ParseError);

    save_text("/tmp/qcorr_test_badjson.json", "{not json");
    CHECK_THROWS_AS(load_json_file("/tmp/qcorr_test_badjson.json"), ParseError);

    // Structurally valid json holding an invalid state (trace 2).
    json bad = state_to_json(werner(0.5));
    bad["re"][0][0] = double(bad["re"][0][0]) + 1.0;
    CHECK_THROWS_AS(state_from_json(bad), InvalidState);
}
