#include "eigenamp/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <system_error>

#include "json.hpp"

#include "eigenamp/errors.hpp"

namespace eigenamp {

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc()) {
        throw InternalError("double formatting failed");
    }
    return std::string(buffer, ptr);
}

void write_trace_csv(std::ostream& out, const RunResult& result) {
    out << "iter,f_lambda0,f_lambda1,gsq_0,gsq_1,w_mag,xi,norm_drift\n";
    for (const TraceRow& row : result.trace) {
        out << row.iter << ',' << format_double(row.f_lambda0) << ','
            << format_double(row.f_lambda1) << ',' << format_double(row.gsq_0) << ','
            << format_double(row.gsq_1) << ',' << format_double(row.w_mag) << ','
            << format_double(row.xi) << ',' << format_double(row.norm_drift) << '\n';
    }
}

namespace {

nlohmann::json row_to_json(const TraceRow& row) {
    return nlohmann::json{{"iter", row.iter},
                          {"f_lambda0", row.f_lambda0},
                          {"f_lambda1", row.f_lambda1},
                          {"gsq_0", row.gsq_0},
                          {"gsq_1", row.gsq_1},
                          {"w_mag", row.w_mag},
                          {"xi", row.xi},
                          {"norm_drift", row.norm_drift}};
}

}  // namespace

void write_run_json(std::ostream& out, const RunResult& result) {
    nlohmann::json doc;
    doc["n_c"] = result.n_c;
    doc["converged"] = result.converged;
    auto& trace = doc["trace"];
    trace = nlohmann::json::array();
    for (const TraceRow& row : result.trace) {
        trace.push_back(row_to_json(row));
    }
    out << doc.dump() << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "axis,mean_nc,std_nc,trials_converged,trials_total\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.axis) << ',' << format_double(row.mean_nc) << ','
            << format_double(row.std_nc) << ',' << row.trials_converged << ','
            << row.trials_total << '\n';
    }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows, double a, double b,
                      double r_squared) {
    nlohmann::json doc;
    auto& table = doc["rows"];
    table = nlohmann::json::array();
    for (const SweepRow& row : rows) {
        table.push_back(nlohmann::json{{"axis", row.axis},
                                       {"mean_nc", row.mean_nc},
                                       {"std_nc", row.std_nc},
                                       {"trials_converged", row.trials_converged},
                                       {"trials_total", row.trials_total}});
    }
    doc["fit"] = nlohmann::json{{"A", a}, {"B", b}, {"r2", r_squared}};
    out << doc.dump() << '\n';
}

void write_spectrum_json(std::ostream& out, const Spectrum& spectrum) {
    nlohmann::json doc;
    doc["n"] = spectrum.size();
    doc["eigenvalues"] = std::vector<double>(
        spectrum.eigenvalues().data(), spectrum.eigenvalues().data() + spectrum.size());
    out << doc.dump() << '\n';
}

Spectrum read_spectrum_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ShapeError(std::string("malformed spectrum JSON: ") + e.what());
    }
    if (!doc.contains("n") || !doc.contains("eigenvalues") || !doc["eigenvalues"].is_array()) {
        throw ShapeError("spectrum JSON needs fields n and eigenvalues");
    }
    const auto values = doc["eigenvalues"].get<std::vector<double>>();
    if (doc["n"].get<long>() != static_cast<long>(values.size())) {
        throw ShapeError("spectrum JSON: n does not match eigenvalue count");
    }
    Eigen::ArrayXd lambdas(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        lambdas[static_cast<Eigen::Index>(k)] = values[k];
    }
    return Spectrum(std::move(lambdas));
}

void write_overlaps_json(std::ostream& out, const InitialOverlaps& overlaps) {
    nlohmann::json doc;
    std::vector<double> re(overlaps.size());
    std::vector<double> im(overlaps.size());
    for (int k = 0; k < overlaps.size(); ++k) {
        re[static_cast<std::size_t>(k)] = overlaps.gamma0()[k].real();
        im[static_cast<std::size_t>(k)] = overlaps.gamma0()[k].imag();
    }
    doc["gamma0_re"] = re;
    doc["gamma0_im"] = im;
    out << doc.dump() << '\n';
}

InitialOverlaps read_overlaps_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ShapeError(std::string("malformed overlaps JSON: ") + e.what());
    }
    if (!doc.contains("gamma0_re") || !doc.contains("gamma0_im")) {
        throw ShapeError("overlaps JSON needs fields gamma0_re and gamma0_im");
    }
    const auto re = doc["gamma0_re"].get<std::vector<double>>();
    const auto im = doc["gamma0_im"].get<std::vector<double>>();
    if (re.size() != im.size()) {
        throw ShapeError("overlaps JSON: real and imaginary arrays differ in length");
    }
    Eigen::ArrayXcd gamma(re.size());
    for (std::size_t k = 0; k < re.size(); ++k) {
        gamma[static_cast<Eigen::Index>(k)] = Complex(re[k], im[k]);
    }
    return InitialOverlaps(std::move(gamma));
}

void write_violations_json(std::ostream& out, const std::vector<Violation>& violations) {
    nlohmann::json doc = nlohmann::json::array();
    for (const Violation& v : violations) {
        doc.push_back(nlohmann::json{
            {"invariant", v.invariant}, {"iter", v.iter}, {"magnitude", v.magnitude}});
    }
    out << doc.dump() << '\n';
}

void write_fit_json(std::ostream& out, double a, double b, double r_squared) {
    nlohmann::json doc;
    doc["A"] = a;
    doc["B"] = b;
    doc["r2"] = r_squared;
    out << doc.dump() << '\n';
}

}  // namespace eigenamp
