#pragma once

// JSON form of lattice functions ({p, n, a, b, values: [[re, im], ...]} in
// row-major cell order) and a small deterministic CSV writer.

#include "padiclab/fourier.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace padiclab {

inline nlohmann::json to_json(const LatticeFunction& f) {
    nlohmann::json j;
    j["p"] = f.prime();
    j["n"] = f.dim();
    j["a"] = f.support_exp();
    j["b"] = f.constancy_exp();
    nlohmann::json vals = nlohmann::json::array();
    for (size_t i = 0; i < f.cell_count(); ++i)
        vals.push_back({f[i].real(), f[i].imag()});
    j["values"] = std::move(vals);
    return j;
}

inline LatticeFunction lattice_from_json(const nlohmann::json& j) {
    LatticeFunction f(j.at("p").get<long>(), j.at("n").get<int>(), j.at("a").get<int>(),
                      j.at("b").get<int>());
    const auto& vals = j.at("values");
    if (vals.size() != f.cell_count())
        throw std::invalid_argument("lattice json: value count mismatch");
    for (size_t i = 0; i < f.cell_count(); ++i)
        f[i] = Complex(vals[i][0].get<double>(), vals[i][1].get<double>());
    return f;
}

// Deterministic CSV: header row, then rows; a provenance comment line with
// the tool version and a config hash (no timestamp).
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header,
              const std::string& provenance = "")
        : os_(os) {
        if (!provenance.empty()) os_ << "# " << provenance << "\n";
        write_row(header);
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        std::vector<std::string> cells;
        (cells.push_back(format(fields)), ...);
        write_row(cells);
    }

    static std::string format(const std::string& s) { return s; }
    static std::string format(const char* s) { return s; }
    static std::string format(long long v) { return std::to_string(v); }
    static std::string format(long v) { return std::to_string(v); }
    static std::string format(int v) { return std::to_string(v); }
    static std::string format(size_t v) { return std::to_string(v); }
    static std::string format(const Rational& q) {
        Rational c = q;
        c.canonicalize();
        return c.get_num().get_str() + "/" + c.get_den().get_str();
    }
    static std::string format(double v) {
        std::ostringstream ss;
        ss << std::setprecision(17) << v;
        return ss.str();
    }

private:
    void write_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ",";
            os_ << cells[i];
        }
        os_ << "\n";
    }
    std::ostream& os_;
};

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace padiclab
