#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "apstab/evolve.hpp"
#include "apstab/trigpoly.hpp"

namespace apstab {

using Json = nlohmann::json;

class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path(path) {}
    std::string path;
};

namespace schema {

/// Exact rationals travel as [p, q] integer pairs; floats are rejected so no
/// coordinate silently loses exactness.
inline Rational rational_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected a [p, q] integer pair");
    if (!j[0].is_number_integer() || !j[1].is_number_integer())
        throw SchemaError(path, "expected integer p and q (floats are not accepted)");
    long long p = j[0].get<long long>(), q = j[1].get<long long>();
    if (q == 0) throw SchemaError(path, "zero denominator");
    return Rational(Integer(p), Integer(q));
}

inline Json rational_to_json(const Rational& r) {
    return Json::array({rational_num(r).convert_to<long long>(), rational_den(r).convert_to<long long>()});
}

/// ExactReal: either a [p, q] rational or a list of radical terms
/// [{"r": [p,q], "d": D, "pi": k}, ...].
inline ExactReal exact_real_from_json(const Json& j, const std::string& path) {
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer()) {
        return ExactReal(rational_from_json(j, path));
    }
    if (!j.is_array()) throw SchemaError(path, "expected [p, q] or a list of radical terms");
    ExactReal out;
    size_t idx = 0;
    for (const auto& term : j) {
        std::string tp = path + "[" + std::to_string(idx++) + "]";
        if (!term.is_object() || !term.contains("r")) throw SchemaError(tp, "expected {r, d?, pi?}");
        Rational r = rational_from_json(term["r"], tp + ".r");
        Integer d = 1;
        int pi_pow = 0;
        if (term.contains("d")) {
            if (!term["d"].is_number_integer()) throw SchemaError(tp + ".d", "expected integer");
            d = Integer(term["d"].get<long long>());
            if (d < 1 || !is_square_free(d)) throw SchemaError(tp + ".d", "d must be square-free and >= 1");
        }
        if (term.contains("pi")) {
            if (!term["pi"].is_number_integer()) throw SchemaError(tp + ".pi", "expected integer");
            pi_pow = term["pi"].get<int>();
        }
        out += ExactReal::term(r, Radical{d, pi_pow});
    }
    return out;
}

inline Json exact_real_to_json(const ExactReal& x) {
    if (x.is_rational()) return rational_to_json(x.rational_value());
    Json terms = Json::array();
    for (const auto& [rad, q] : x.terms()) {
        Json t;
        t["r"] = rational_to_json(q);
        if (rad.surd != 1) t["d"] = rad.surd.convert_to<long long>();
        if (rad.pi_pow != 0) t["pi"] = rad.pi_pow;
        terms.push_back(t);
    }
    return terms;
}

inline ExactComplex complex_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected {re, im}");
    ExactReal re = j.contains("re") ? exact_real_from_json(j["re"], path + ".re") : ExactReal();
    ExactReal im = j.contains("im") ? exact_real_from_json(j["im"], path + ".im") : ExactReal();
    return {re, im};
}

inline Json complex_to_json(const ExactComplex& c) {
    Json j;
    j["re"] = exact_real_to_json(c.re());
    j["im"] = exact_real_to_json(c.im());
    return j;
}

inline RealConstant constant_from_json(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) throw SchemaError(path, "expected {kind, ...}");
    std::string kind = j["kind"].get<std::string>();
    Rational scale(1);
    if (j.contains("p") || j.contains("q")) {
        long long p = j.value("p", 1LL), q = j.value("q", 1LL);
        if (!j["p"].is_number_integer() || (j.contains("q") && !j["q"].is_number_integer()))
            throw SchemaError(path, "p and q must be integers");
        if (q == 0) throw SchemaError(path, "zero denominator");
        scale = Rational(Integer(p), Integer(q));
    }
    try {
        if (kind == "rational") return RealConstant::rational(scale);
        if (kind == "sqrt") {
            if (!j.contains("d") || !j["d"].is_number_integer())
                throw SchemaError(path, "sqrt constant requires integer d");
            return RealConstant::sqrt(Integer(j["d"].get<long long>()), scale);
        }
        if (kind == "pi") return RealConstant::pi(scale);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(path, "unknown constant kind '" + kind + "'");
}

inline Json constant_to_json(const RealConstant& c) {
    Json j;
    switch (c.kind) {
        case ConstantKind::Rational: j["kind"] = "rational"; break;
        case ConstantKind::Sqrt:
            j["kind"] = "sqrt";
            j["d"] = c.surd.convert_to<long long>();
            break;
        case ConstantKind::Pi: j["kind"] = "pi"; break;
    }
    j["p"] = rational_num(c.scale).convert_to<long long>();
    j["q"] = rational_den(c.scale).convert_to<long long>();
    return j;
}

/// Frequencies travel as {"coords": [[p, q], ...]} against the basis array.
inline Frequency frequency_from_json(const Json& j, const BasisPtr& basis, const std::string& path) {
    const Json* coords_json = &j;
    if (j.is_object()) {
        if (!j.contains("coords")) throw SchemaError(path, "expected {coords: [[p, q], ...]}");
        coords_json = &j["coords"];
    }
    if (!coords_json->is_array() || coords_json->size() != basis->size())
        throw SchemaError(path, "frequency coordinates must match the basis length " +
                                    std::to_string(basis->size()));
    std::vector<Rational> coords;
    size_t idx = 0;
    for (const auto& c : *coords_json)
        coords.push_back(rational_from_json(c, path + ".coords[" + std::to_string(idx++) + "]"));
    return Frequency(basis, std::move(coords));
}

inline Json frequency_to_json(const Frequency& f) {
    Json coords = Json::array();
    for (const auto& c : f.coords()) coords.push_back(rational_to_json(c));
    return Json{{"coords", coords}};
}

}  // namespace schema

/// Command-specific knobs from the problem file's analysis block. CLI flags
/// override these field-wise.
struct AnalysisConfig {
    std::optional<double> tol;
    std::optional<double> horizon;
    std::optional<double> grid_step;
    std::optional<unsigned long> bound;
    std::optional<Rational> eps;
    std::optional<Rational> tau;
    std::vector<Rational> alphas;
    std::optional<ExactComplex> lambda;
    std::vector<std::complex<double>> sweep_points;
    std::vector<Frequency> candidates;
    std::optional<unsigned long> lattice_bound;
    std::optional<unsigned> power_iterations;
    std::optional<Rational> bridge_alpha;
    std::optional<double> bridge_lambda0;
};

/// Parsed, validated problem: basis, dimension, constant part A0, harmonic
/// coefficient A(t), optional forcing, and the analysis block.
struct ProblemFile {
    BasisPtr basis;
    size_t dimension = 1;
    std::optional<std::vector<std::vector<ExactComplex>>> a0;
    MatrixTrigPoly a;
    std::optional<MatrixTrigPoly> forcing;
    AnalysisConfig analysis;

    ProblemFile() : a(nullptr, 0, 0) {}
    explicit ProblemFile(BasisPtr b, size_t n)
        : basis(std::move(b)), dimension(n), a(basis, n, n) {}

    bool is_scalar() const { return dimension == 1; }

    TrigPoly scalar_coefficient() const {
        if (!is_scalar()) throw std::logic_error("scalar_coefficient: dimension != 1");
        TrigPoly p = a.at(0, 0);
        if (a0) {
            p = p + TrigPoly::constant(basis, (*a0)[0][0]);
        }
        return p;
    }

    std::optional<MatrixXcd> a0_matrix() const {
        if (!a0) return std::nullopt;
        MatrixXcd m(dimension, dimension);
        for (size_t r = 0; r < dimension; ++r)
            for (size_t c = 0; c < dimension; ++c) m(r, c) = (*a0)[r][c].to_complex();
        return m;
    }

    LinearSystem system() const { return LinearSystem(a0_matrix(), a); }
};

namespace detail {

inline MatrixTrigPoly parse_harmonic_terms(const Json& j, const BasisPtr& basis, size_t rows, size_t cols,
                                           const std::string& path) {
    MatrixTrigPoly out(basis, rows, cols);
    if (!j.is_array()) throw SchemaError(path, "expected a list of harmonic terms");
    size_t idx = 0;
    for (const auto& term : j) {
        std::string tp = path + "[" + std::to_string(idx++) + "]";
        if (!term.is_object() || !term.contains("freq") || !term.contains("coeff"))
            throw SchemaError(tp, "expected {freq, coeff, form?}");
        Frequency f = schema::frequency_from_json(term["freq"], basis, tp + ".freq");
        std::string form = term.value("form", std::string("exp"));
        const Json& coeff = term["coeff"];
        if (!coeff.is_array() || coeff.size() != rows) throw SchemaError(tp + ".coeff", "expected n rows");
        for (size_t r = 0; r < rows; ++r) {
            if (!coeff[r].is_array() || coeff[r].size() != cols)
                throw SchemaError(tp + ".coeff", "expected n columns per row");
            for (size_t c = 0; c < cols; ++c) {
                ExactComplex value = schema::complex_from_json(
                    coeff[r][c], tp + ".coeff[" + std::to_string(r) + "][" + std::to_string(c) + "]");
                if (value.is_zero()) continue;
                if (form == "exp") {
                    out.at(r, c).add_term(f, value);
                } else if (form == "cos") {
                    ExactComplex half = value * ExactComplex(Rational(1, 2));
                    out.at(r, c).add_term(f, half);
                    out.at(r, c).add_term(-f, half);
                } else if (form == "sin") {
                    ExactComplex s = value * ExactComplex(ExactReal(), ExactReal(Rational(-1, 2)));
                    out.at(r, c).add_term(f, s);
                    out.at(r, c).add_term(-f, -s);
                } else {
                    throw SchemaError(tp + ".form", "expected exp, cos or sin");
                }
            }
        }
    }
    return out;
}

inline Json harmonic_terms_to_json(const MatrixTrigPoly& m) {
    Json terms = Json::array();
    for (const auto& f : m.pooled_spectrum()) {
        Json term;
        term["freq"] = schema::frequency_to_json(f);
        Json coeff = Json::array();
        for (size_t r = 0; r < m.rows(); ++r) {
            Json row = Json::array();
            for (size_t c = 0; c < m.cols(); ++c)
                row.push_back(schema::complex_to_json(m.at(r, c).coefficient(f)));
            coeff.push_back(row);
        }
        term["coeff"] = coeff;
        term["form"] = "exp";
        terms.push_back(term);
    }
    return terms;
}

inline AnalysisConfig parse_analysis(const Json& j, const BasisPtr& basis) {
    AnalysisConfig out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw SchemaError("analysis", "expected an object");
    if (j.contains("tol")) out.tol = j["tol"].get<double>();
    if (j.contains("horizon")) out.horizon = j["horizon"].get<double>();
    if (j.contains("grid_step")) out.grid_step = j["grid_step"].get<double>();
    if (j.contains("bound")) out.bound = j["bound"].get<unsigned long>();
    if (j.contains("eps")) out.eps = schema::rational_from_json(j["eps"], "analysis.eps");
    if (j.contains("tau")) out.tau = schema::rational_from_json(j["tau"], "analysis.tau");
    if (j.contains("alphas")) {
        size_t idx = 0;
        for (const auto& a : j["alphas"])
            out.alphas.push_back(schema::rational_from_json(a, "analysis.alphas[" + std::to_string(idx++) + "]"));
    }
    if (j.contains("lambda")) out.lambda = schema::complex_from_json(j["lambda"], "analysis.lambda");
    if (j.contains("sweep_points")) {
        for (const auto& p : j["sweep_points"])
            out.sweep_points.emplace_back(p.value("re", 0.0), p.value("im", 0.0));
    }
    if (j.contains("candidates")) {
        size_t idx = 0;
        for (const auto& c : j["candidates"])
            out.candidates.push_back(schema::frequency_from_json(
                c, basis, "analysis.candidates[" + std::to_string(idx++) + "]"));
    }
    if (j.contains("lattice_bound")) out.lattice_bound = j["lattice_bound"].get<unsigned long>();
    if (j.contains("power_iterations")) out.power_iterations = j["power_iterations"].get<unsigned>();
    if (j.contains("bridge_alpha"))
        out.bridge_alpha = schema::rational_from_json(j["bridge_alpha"], "analysis.bridge_alpha");
    if (j.contains("bridge_lambda0")) out.bridge_lambda0 = j["bridge_lambda0"].get<double>();
    return out;
}

inline Json analysis_to_json(const AnalysisConfig& a) {
    Json j = Json::object();
    if (a.tol) j["tol"] = *a.tol;
    if (a.horizon) j["horizon"] = *a.horizon;
    if (a.grid_step) j["grid_step"] = *a.grid_step;
    if (a.bound) j["bound"] = *a.bound;
    if (a.eps) j["eps"] = schema::rational_to_json(*a.eps);
    if (a.tau) j["tau"] = schema::rational_to_json(*a.tau);
    if (!a.alphas.empty()) {
        Json arr = Json::array();
        for (const auto& x : a.alphas) arr.push_back(schema::rational_to_json(x));
        j["alphas"] = arr;
    }
    if (a.lambda) j["lambda"] = schema::complex_to_json(*a.lambda);
    if (!a.sweep_points.empty()) {
        Json arr = Json::array();
        for (const auto& p : a.sweep_points) arr.push_back(Json{{"re", p.real()}, {"im", p.imag()}});
        j["sweep_points"] = arr;
    }
    if (!a.candidates.empty()) {
        Json arr = Json::array();
        for (const auto& c : a.candidates) arr.push_back(schema::frequency_to_json(c));
        j["candidates"] = arr;
    }
    if (a.lattice_bound) j["lattice_bound"] = *a.lattice_bound;
    if (a.power_iterations) j["power_iterations"] = *a.power_iterations;
    if (a.bridge_alpha) j["bridge_alpha"] = schema::rational_to_json(*a.bridge_alpha);
    if (a.bridge_lambda0) j["bridge_lambda0"] = *a.bridge_lambda0;
    return j;
}

}  // namespace detail

/// Parses and validates a problem file. Exact rationals are preserved;
/// cos/sin sugar is expanded to exponential pairs.
inline ProblemFile parse_problem(const Json& j) {
    if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
    if (!j.contains("basis") || !j["basis"].is_array() || j["basis"].empty())
        throw SchemaError("basis", "expected a nonempty list of constants");
    std::vector<RealConstant> constants;
    size_t idx = 0;
    for (const auto& c : j["basis"])
        constants.push_back(schema::constant_from_json(c, "basis[" + std::to_string(idx++) + "]"));
    BasisPtr basis;
    try {
        basis = make_basis(std::move(constants));
    } catch (const std::invalid_argument& e) {
        throw SchemaError("basis", e.what());
    }

    size_t n = 1;
    if (j.contains("dimension")) {
        if (!j["dimension"].is_number_integer() || j["dimension"].get<long long>() < 1)
            throw SchemaError("dimension", "expected a positive integer");
        n = j["dimension"].get<size_t>();
    }

    ProblemFile out(basis, n);

    if (j.contains("A0") && !j["A0"].is_null()) {
        const Json& a0 = j["A0"];
        if (!a0.is_array() || a0.size() != n) throw SchemaError("A0", "expected an n x n matrix");
        std::vector<std::vector<ExactComplex>> m(n, std::vector<ExactComplex>(n));
        for (size_t r = 0; r < n; ++r) {
            if (!a0[r].is_array() || a0[r].size() != n) throw SchemaError("A0", "expected an n x n matrix");
            for (size_t c = 0; c < n; ++c)
                m[r][c] = schema::complex_from_json(
                    a0[r][c], "A0[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
        out.a0 = std::move(m);
    }

    out.a = j.contains("A") ? detail::parse_harmonic_terms(j["A"], basis, n, n, "A")
                            : MatrixTrigPoly(basis, n, n);
    if (j.contains("forcing") && !j["forcing"].is_null())
        out.forcing = detail::parse_harmonic_terms(j["forcing"], basis, n, 1, "forcing");
    out.analysis = detail::parse_analysis(j.contains("analysis") ? j["analysis"] : Json(), basis);
    return out;
}

inline ProblemFile parse_problem_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("not valid JSON: ") + e.what());
    }
    return parse_problem(j);
}

/// Canonical serialization: fixed key order (alphabetical via nlohmann),
/// expanded exponential form, exact rationals. serialize(parse(.)) is
/// idempotent byte-for-byte.
inline Json serialize_problem(const ProblemFile& p) {
    Json j;
    Json basis = Json::array();
    for (const auto& c : p.basis->entries()) basis.push_back(schema::constant_to_json(c));
    j["basis"] = basis;
    j["dimension"] = p.dimension;
    if (p.a0) {
        Json a0 = Json::array();
        for (size_t r = 0; r < p.dimension; ++r) {
            Json row = Json::array();
            for (size_t c = 0; c < p.dimension; ++c) row.push_back(schema::complex_to_json((*p.a0)[r][c]));
            a0.push_back(row);
        }
        j["A0"] = a0;
    }
    j["A"] = detail::harmonic_terms_to_json(p.a);
    if (p.forcing) j["forcing"] = detail::harmonic_terms_to_json(*p.forcing);
    Json analysis = detail::analysis_to_json(p.analysis);
    if (!analysis.empty()) j["analysis"] = analysis;
    return j;
}

inline std::string serialize_problem_text(const ProblemFile& p) { return serialize_problem(p).dump(2) + "\n"; }

}  // namespace apstab
