// Copyright 2026 The nlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON serialization of every library type, and CSV/JSON relation reports.
//
// Matrices are {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major
// order. Doubles are written in shortest round-trip form, so parse followed
// by serialize reproduces finite values bit for bit. Typed objects carry a
// "type" field: density, povm, pvm, dilation, kraus, coupling, instrument.

#ifndef NLAB_IO_HPP
#define NLAB_IO_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nlab/relations.hpp"

namespace nlab {

using Json = nlohmann::json;

[[noreturn]] inline void throw_parse(const std::string &what) {
    throw NlabError(ErrorKind::kParse, "format", what);
}

namespace detail {

inline const Json &field(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw_parse(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

inline Index index_field(const Json &j, const char *key) {
    const Json &v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw_parse(std::string("field \"") + key + "\" must be a nonnegative integer");
    }
    return static_cast<Index>(v.get<long long>());
}

inline double number(const Json &v) {
    if (!v.is_number()) {
        throw_parse("expected a number");
    }
    return v.get<double>();
}

/// Non-finite values become the strings "inf", "-inf" or "nan".
inline Json real_or_string(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    if (std::isnan(x)) {
        return "nan";
    }
    return x > 0 ? "inf" : "-inf";
}

inline std::vector<std::string> labels_field(const Json &j, std::size_t n) {
    if (!j.contains("labels")) {
        return default_labels(n);
    }
    const Json &arr = j.at("labels");
    if (!arr.is_array()) {
        throw_parse("\"labels\" must be an array of strings");
    }
    std::vector<std::string> out;
    for (const Json &l : arr) {
        if (!l.is_string()) {
            throw_parse("\"labels\" must be an array of strings");
        }
        out.push_back(l.get<std::string>());
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices.

inline Json matrix_to_json(const Matrix &m) {
    Json data = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            data.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json &j) {
    const Index rows = detail::index_field(j, "rows");
    const Index cols = detail::index_field(j, "cols");
    const Json &data = detail::field(j, "data");
    if (!data.is_array() || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw_parse("matrix data must hold rows*cols = " + std::to_string(rows * cols) + " entries");
    }
    Matrix m(rows, cols);
    for (Index k = 0; k < rows * cols; ++k) {
        const Json &e = data[static_cast<std::size_t>(k)];
        if (!e.is_array() || e.size() != 2) {
            throw_parse("matrix entries must be [re, im] pairs");
        }
        m(k / cols, k % cols) = Complex(detail::number(e[0]), detail::number(e[1]));
    }
    return m;
}

inline Json matrices_to_json(const std::vector<Matrix> &ms) {
    Json arr = Json::array();
    for (const Matrix &m : ms) {
        arr.push_back(matrix_to_json(m));
    }
    return arr;
}

inline std::vector<Matrix> matrices_from_json(const Json &arr) {
    if (!arr.is_array()) {
        throw_parse("expected an array of matrices");
    }
    std::vector<Matrix> out;
    for (const Json &m : arr) {
        out.push_back(matrix_from_json(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Typed objects.

inline Json to_json(const DensityMatrix &rho) {
    return Json{{"type", "density"}, {"dim", rho.dim()}, {"matrix", matrix_to_json(rho.mat())}};
}

inline Json to_json(const Povm &m) {
    return Json{{"type", "povm"}, {"dim", m.dim()}, {"labels", m.labels()}, {"effects", matrices_to_json(m.effects())}};
}

inline Json to_json(const Pvm &q) {
    return Json{{"type", "pvm"}, {"dim", q.dim()}, {"projectors", matrices_to_json(q.projectors())}};
}

inline Json to_json(const NaimarkDilation &d) {
    Json j{{"type", "dilation"},
           {"dim_s", d.dim_s()},
           {"dim_a", d.dim_a()},
           {"labels", d.labels()},
           {"ancilla", matrix_to_json(d.ancilla_state().mat())},
           {"projectors", matrices_to_json(d.pvm().projectors())}};
    if (d.has_completion()) {
        j["completion"] = matrix_to_json(d.completion());
    }
    return j;
}

inline Json to_json(const KrausCorrectionFamily &k) {
    Json corr = Json::array();
    for (const auto &list : k.corrections()) {
        corr.push_back(matrices_to_json(list));
    }
    return Json{{"type", "kraus"}, {"povm", to_json(k.povm())}, {"corrections", std::move(corr)}};
}

inline Json to_json(const CouplingModel &c) {
    return Json{{"type", "coupling"},
                {"dim_s", c.dim_s},
                {"dim_a", c.dim_a},
                {"labels", c.labels.empty() ? default_labels(c.pointers.size()) : c.labels},
                {"unitary", matrix_to_json(c.unitary)},
                {"ancilla_ket", matrix_to_json(Matrix(c.ancilla_ket))},
                {"pointers", matrices_to_json(c.pointers)}};
}

inline Json to_json(const InstrumentOutput &out, const std::string &rule) {
    Json branches = Json::array();
    for (const Branch &b : out.branches) {
        const auto post = b.normalized();
        branches.push_back(Json{{"label", b.label},
                                {"probability", b.probability},
                                {"state", matrix_to_json(b.state)},
                                {"normalized", post ? matrix_to_json(post->mat()) : Json(nullptr)}});
    }
    return Json{{"type", "instrument"},
                {"rule", rule},
                {"branches", std::move(branches)},
                {"average", matrix_to_json(out.average.mat())}};
}

inline DensityMatrix density_from_json(const Json &j) {
    return DensityMatrix::from_matrix(matrix_from_json(detail::field(j, "matrix")));
}

inline Povm povm_from_json(const Json &j) {
    std::vector<Matrix> effects = matrices_from_json(detail::field(j, "effects"));
    std::vector<std::string> labels = detail::labels_field(j, effects.size());
    return validate_povm(std::move(effects), std::move(labels));
}

inline Pvm pvm_from_json(const Json &j) {
    return validate_pvm(matrices_from_json(detail::field(j, "projectors")));
}

inline NaimarkDilation dilation_from_json(const Json &j) {
    const Index ds = detail::index_field(j, "dim_s");
    const Index da = detail::index_field(j, "dim_a");
    std::vector<Matrix> projectors = matrices_from_json(detail::field(j, "projectors"));
    std::vector<std::string> labels = detail::labels_field(j, projectors.size());
    DensityMatrix anc = DensityMatrix::from_matrix(matrix_from_json(detail::field(j, "ancilla")));
    return make_dilation(std::move(anc), std::move(projectors), ds, da, std::move(labels));
}

/// Shapes are validated; the correction condition is not. Use
/// make_correction_family or correction_condition_residual on the result.
inline KrausCorrectionFamily kraus_from_json_unchecked(const Json &j) {
    Povm povm = povm_from_json(detail::field(j, "povm"));
    const Json &arr = detail::field(j, "corrections");
    if (!arr.is_array()) {
        throw_parse("\"corrections\" must be an array of matrix arrays");
    }
    std::vector<std::vector<Matrix>> corr;
    for (const Json &list : arr) {
        corr.push_back(matrices_from_json(list));
    }
    return make_correction_family_unchecked(std::move(povm), std::move(corr));
}

inline KrausCorrectionFamily kraus_from_json(const Json &j) {
    KrausCorrectionFamily k = kraus_from_json_unchecked(j);
    return make_correction_family(k.povm(), k.corrections());
}

inline CouplingModel coupling_from_json(const Json &j) {
    CouplingModel c;
    c.dim_s = detail::index_field(j, "dim_s");
    c.dim_a = detail::index_field(j, "dim_a");
    c.unitary = matrix_from_json(detail::field(j, "unitary"));
    const Matrix ket = matrix_from_json(detail::field(j, "ancilla_ket"));
    if (ket.cols() != 1) {
        throw_parse("\"ancilla_ket\" must be a column vector");
    }
    c.ancilla_ket = ket.col(0);
    c.pointers = matrices_from_json(detail::field(j, "pointers"));
    c.labels = detail::labels_field(j, c.pointers.size());
    validate_coupling(c);
    return c;
}

using TypedObject =
    std::variant<DensityMatrix, Povm, Pvm, NaimarkDilation, KrausCorrectionFamily, CouplingModel>;

/// Dispatches on "type" and validates every invariant of the result.
inline TypedObject object_from_json(const Json &j) {
    const Json &type = detail::field(j, "type");
    if (!type.is_string()) {
        throw_parse("\"type\" must be a string");
    }
    const std::string t = type.get<std::string>();
    if (t == "density") {
        return density_from_json(j);
    }
    if (t == "povm") {
        return povm_from_json(j);
    }
    if (t == "pvm") {
        return pvm_from_json(j);
    }
    if (t == "dilation") {
        return dilation_from_json(j);
    }
    if (t == "kraus") {
        return kraus_from_json(j);
    }
    if (t == "coupling") {
        return coupling_from_json(j);
    }
    throw_parse("unknown object type \"" + t + "\"");
}

inline std::string type_name(const TypedObject &o) {
    static const char *names[] = {"density", "povm", "pvm", "dilation", "kraus", "coupling"};
    return names[o.index()];
}

// ---------------------------------------------------------------------------
// Files.

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw_parse("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception &e) {
        throw_parse(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NlabError(ErrorKind::kDomain, "output", "cannot write " + path);
    }
    out << text;
}

inline std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Relation reports.

inline Json to_json(const RelationReport &r) {
    Json j{{"relation", r.relation},
           {"seed", r.seed},
           {"dim_s", r.dim_s},
           {"dim_a", r.dim_a},
           {"alpha", r.alpha ? Json(*r.alpha) : Json(nullptr)},
           {"lhs", detail::real_or_string(r.lhs)},
           {"rhs", detail::real_or_string(r.rhs)},
           {"margin", detail::real_or_string(r.margin)},
           {"pass", r.pass}};
    if (!r.outcome.empty()) {
        j["outcome"] = r.outcome;
    }
    if (r.skipped) {
        j["skipped"] = true;
    }
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    return j;
}

inline std::string format_real(double x) {
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline constexpr const char *kReportCsvHeader = "relation,seed,dim_s,dim_a,alpha,lhs,rhs,margin,pass";

inline std::string to_csv_row(const RelationReport &r) {
    std::ostringstream os;
    os << r.relation << ',' << r.seed << ',' << r.dim_s << ',' << r.dim_a << ','
       << (r.alpha ? format_real(*r.alpha) : std::string()) << ',' << format_real(r.lhs) << ','
       << format_real(r.rhs) << ',' << format_real(r.margin) << ',' << (r.pass ? "true" : "false");
    return os.str();
}

inline std::string reports_to_csv(const std::vector<RelationReport> &reports) {
    std::string out = std::string(kReportCsvHeader) + "\n";
    for (const RelationReport &r : reports) {
        out += to_csv_row(r) + "\n";
    }
    return out;
}

}  // namespace nlab

#endif
