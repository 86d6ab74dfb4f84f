#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eigenamp/errors.hpp"
#include "eigenamp/io.hpp"
#include "eigenamp/proof_check.hpp"
#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"

using namespace eigenamp;

namespace {

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("double formatting round-trips every value through the shortest form") {
    for (const double value : {0.1, 1.0 / 3.0, kPi, 1e-4, 6.02e23, -0.0, 1.0,
                               0.8983526674850426, 1.5421256083984926e-07}) {
        CHECK(std::stod(format_double(value)) == value);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0001) == "1e-04");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trace CSV carries the pinned header and formatted rows") {
    RunConfig config;
    config.epsilon = 0.012;
    const RunResult result = run_until(make_ladder_spectrum(4, 0.25), uniform_overlaps(4), config);

    std::ostringstream out;
    write_trace_csv(out, result);
    const std::string text = out.str();
    CHECK(first_line(text) == "iter,f_lambda0,f_lambda1,gsq_0,gsq_1,w_mag,xi,norm_drift");

    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    std::getline(lines, line);
    // Row 0 basics: iteration index, quarter fractions, unit multipliers.
    CHECK(line.substr(0, 16) == "0,0.25,0.25,1,1,");
    int rows = 1;
    while (std::getline(lines, line)) {
        ++rows;
    }
    CHECK(rows == static_cast<int>(result.trace.size()));
}

TEST_CASE("run JSON parses back with identical values") {
    Eigen::ArrayXd lams(2);
    lams << 0.2, 0.8;
    RunConfig config;
    config.epsilon = 0.012;
    const RunResult result = run_until(Spectrum(lams), uniform_overlaps(2), config);

    std::ostringstream out;
    write_run_json(out, result);
    const nlohmann::json doc = nlohmann::json::parse(out.str());
    CHECK(doc["n_c"].get<long>() == result.n_c);
    CHECK(doc["converged"].get<bool>() == result.converged);
    REQUIRE(doc["trace"].size() == result.trace.size());
    CHECK(doc["trace"][1]["f_lambda0"].get<double>() == result.trace[1].f_lambda0);
    CHECK(doc["trace"][1]["w_mag"].get<double>() == result.trace[1].w_mag);
}

TEST_CASE("sweep CSV and JSON expose the same table") {
    std::vector<SweepRow> rows(2);
    rows[0] = SweepRow{10.0, 123.25, 4.5, 99, 100};
    rows[1] = SweepRow{100.0, 1130.5, 41.0, 100, 100};

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    CHECK(first_line(csv.str()) == "axis,mean_nc,std_nc,trials_converged,trials_total");
    CHECK(csv.str().find("10,123.25,4.5,99,100\n") != std::string::npos);

    std::ostringstream json_out;
    write_sweep_json(json_out, rows, 1.13, 0.2, 0.999);
    const nlohmann::json doc = nlohmann::json::parse(json_out.str());
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][1]["mean_nc"].get<double>() == 1130.5);
    CHECK(doc["rows"][0]["trials_converged"].get<long>() == 99);
    CHECK(doc["fit"]["A"].get<double>() == 1.13);
    CHECK(doc["fit"]["B"].get<double>() == 0.2);
    CHECK(doc["fit"]["r2"].get<double>() == 0.999);
}

TEST_CASE("spectrum JSON round-trips bit for bit") {
    const Spectrum s = make_random_spectrum(7, 0.04, 5);
    std::ostringstream out;
    write_spectrum_json(out, s);

    std::istringstream in(out.str());
    const Spectrum loaded = read_spectrum_json(in);
    REQUIRE(loaded.size() == s.size());
    for (int k = 0; k < s.size(); ++k) {
        CHECK(loaded.lambda(k) == s.lambda(k));
    }

    std::istringstream malformed("{not json");
    CHECK_THROWS_AS(read_spectrum_json(malformed), ShapeError);
    std::istringstream missing(R"({"n": 3})");
    CHECK_THROWS_AS(read_spectrum_json(missing), ShapeError);
    std::istringstream mismatched(R"({"n": 3, "eigenvalues": [0.1, 0.5]})");
    CHECK_THROWS_AS(read_spectrum_json(mismatched), ShapeError);
    // Structural parse succeeds but the eigenvalue contract still applies.
    std::istringstream unsorted(R"({"n": 2, "eigenvalues": [0.5, 0.1]})");
    CHECK_THROWS_AS(read_spectrum_json(unsorted), DomainError);
}

TEST_CASE("overlaps JSON round-trips bit for bit") {
    const InitialOverlaps overlaps = random_overlaps(5, 77);
    std::ostringstream out;
    write_overlaps_json(out, overlaps);

    std::istringstream in(out.str());
    const InitialOverlaps loaded = read_overlaps_json(in);
    REQUIRE(loaded.size() == overlaps.size());
    for (int k = 0; k < overlaps.size(); ++k) {
        CHECK(loaded.gamma0()[k] == overlaps.gamma0()[k]);
    }

    std::istringstream malformed("[");
    CHECK_THROWS_AS(read_overlaps_json(malformed), ShapeError);
    std::istringstream missing(R"({"gamma0_re": [1.0]})");
    CHECK_THROWS_AS(read_overlaps_json(missing), ShapeError);
    std::istringstream uneven(R"({"gamma0_re": [1.0, 0.0], "gamma0_im": [0.0]})");
    CHECK_THROWS_AS(read_overlaps_json(uneven), ShapeError);
}

TEST_CASE("violation and fit reports serialize as documented") {
    std::ostringstream empty;
    write_violations_json(empty, {});
    CHECK(first_line(empty.str()) == "[]");

    std::vector<Violation> violations;
    violations.push_back(Violation{"w-monotone", 12, 3.5e-9});
    std::ostringstream out;
    write_violations_json(out, violations);
    const nlohmann::json doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["invariant"].get<std::string>() == "w-monotone");
    CHECK(doc[0]["iter"].get<long>() == 12);
    CHECK(doc[0]["magnitude"].get<double>() == 3.5e-9);

    std::ostringstream fit;
    write_fit_json(fit, 2.017, -0.31, 0.9987);
    const nlohmann::json fit_doc = nlohmann::json::parse(fit.str());
    CHECK(fit_doc["A"].get<double>() == 2.017);
    CHECK(fit_doc["B"].get<double>() == -0.31);
    CHECK(fit_doc["r2"].get<double>() == 0.9987);
}
