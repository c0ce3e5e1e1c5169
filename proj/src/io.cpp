// Copyright 2026 The qstmle Authors
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

#include "qst/io.hpp"

#include "qst/error.hpp"

#include <fstream>

namespace qst::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

const Json& field(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) fail(std::string("missing field '") + key + "'");
    return doc.at(key);
}

int read_qubits(const Json& doc) {
    const Json& n = field(doc, "n");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1 || n.get<std::int64_t>() > kMaxPauliQubits) {
        fail("field 'n' must be an integer in [1, " + std::to_string(kMaxPauliQubits) + "]");
    }
    return n.get<int>();
}

double read_number(const Json& v, const char* what) {
    if (!v.is_number()) fail(std::string(what) + " must be numeric");
    return v.get<double>();
}

Complex read_complex(const Json& v) {
    if (!v.is_array() || v.size() != 2) fail("complex entries must be [re, im] pairs");
    return {read_number(v[0], "real part"), read_number(v[1], "imaginary part")};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

} // namespace

Json state_to_json(const AnyState& state, std::string_view kind) {
    Json doc;
    if (const auto* rho = std::get_if<DensityMatrix>(&state)) {
        doc["n"] = rho->num_qubits();
        doc["kind"] = std::string(kind);
        Json dense = Json::array();
        const CMatrix& m = rho->matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) dense.push_back(complex_json(m(i, j)));
        doc["dense"] = std::move(dense);
        return doc;
    }
    const auto& prod = std::get<ProductState>(state);
    doc["n"] = prod.num_qubits();
    doc["kind"] = std::string(kind);
    Json factors = Json::array();
    for (const Qubit2& f : prod.factors()) {
        factors.push_back(Json::array({complex_json(f(0, 0)), complex_json(f(0, 1)),
                                       complex_json(f(1, 0)), complex_json(f(1, 1))}));
    }
    doc["factors"] = std::move(factors);
    doc["depolarizing"] = prod.depolarizing();
    return doc;
}

AnyState state_from_json(const Json& doc) {
    const int n = read_qubits(doc);
    if (!field(doc, "kind").is_string()) fail("field 'kind' must be a string");
    try {
        if (doc.contains("dense")) {
            if (n > kDefaultDenseQubitCap) fail("dense state exceeds the dense capacity");
            const Json& dense = doc.at("dense");
            const Eigen::Index d = Eigen::Index{1} << n;
            if (!dense.is_array() || dense.size() != static_cast<std::size_t>(d * d)) {
                fail("field 'dense' must hold d^2 entries");
            }
            CMatrix m(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) m(i, j) = read_complex(dense[i * d + j]);
            return DensityMatrix(std::move(m));
        }
        const Json& factors = field(doc, "factors");
        if (!factors.is_array() || factors.size() != static_cast<std::size_t>(n)) {
            fail("field 'factors' must hold n single-qubit states");
        }
        std::vector<Qubit2> fs;
        for (const Json& f : factors) {
            if (!f.is_array() || f.size() != 4) fail("each factor must hold 4 entries");
            Qubit2 q;
            q << read_complex(f[0]), read_complex(f[1]), read_complex(f[2]), read_complex(f[3]);
            fs.push_back(q);
        }
        const double p = doc.contains("depolarizing") ? read_number(doc.at("depolarizing"), "depolarizing") : 0.0;
        return ProductState(std::move(fs), p);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        fail(std::string("invalid state: ") + e.what());
    }
}

Json ensemble_to_json(const PovmEnsemble& ensemble) {
    Json doc;
    doc["family"] = std::string(to_string(ensemble.family()));
    doc["n"] = ensemble.num_qubits();
    if (ensemble.family() == PovmFamily::pauli) {
        Json idx = Json::array();
        for (const PauliString& s : ensemble.strings()) idx.push_back(s.index());
        doc["indices"] = std::move(idx);
    }
    return doc;
}

PovmEnsemble ensemble_from_json(const Json& doc, int cap) {
    const int n = read_qubits(doc);
    const Json& family = field(doc, "family");
    if (!family.is_string()) fail("field 'family' must be a string");
    try {
        const PovmFamily fam = parse_povm_family(family.get<std::string>());
        if (fam == PovmFamily::tetrahedral) {
            if (doc.contains("indices")) fail("tetrahedral ensembles carry no indices");
            return PovmEnsemble::tetrahedral(n, cap);
        }
        const Json& idx = field(doc, "indices");
        if (!idx.is_array() || idx.empty()) fail("field 'indices' must be a non-empty array");
        const std::uint64_t limit = std::uint64_t{1} << (2 * n);
        std::vector<PauliString> strings;
        strings.reserve(idx.size());
        for (const Json& v : idx) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                fail("Pauli indices must be non-negative integers");
            }
            const auto i = v.get<std::uint64_t>();
            if (i >= limit) fail("Pauli index " + std::to_string(i) + " exceeds 4^n - 1");
            strings.push_back(PauliString::from_index(n, i));
        }
        return PovmEnsemble::pauli(n, std::move(strings));
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        fail(std::string("invalid ensemble: ") + e.what());
    }
}

Json frequencies_to_json(const FrequencyTable& table) {
    Json doc = ensemble_to_json(table.ensemble());
    Json out;
    out["n"] = doc["n"];
    out["family"] = doc["family"];
    if (doc.contains("indices")) out["indices"] = std::move(doc["indices"]);
    if (table.shots()) {
        out["shots"] = *table.shots();
    } else {
        out["shots"] = "inf";
    }
    out["freqs"] = Json(std::vector<double>(table.freqs().begin(), table.freqs().end()));
    return out;
}

FrequencyTable frequencies_from_json(const Json& doc, int cap) {
    PovmEnsemble ensemble = ensemble_from_json(doc, cap);
    const Json& shots = field(doc, "shots");
    std::optional<std::uint64_t> n_shots;
    if (shots.is_string()) {
        if (shots.get<std::string>() != "inf") fail("field 'shots' must be an integer or \"inf\"");
    } else if (shots.is_number_integer() && shots.get<std::int64_t>() >= 1) {
        n_shots = shots.get<std::uint64_t>();
    } else {
        fail("field 'shots' must be a positive integer or \"inf\"");
    }
    const Json& freqs = field(doc, "freqs");
    if (!freqs.is_array()) fail("field 'freqs' must be an array");
    std::vector<double> f;
    f.reserve(freqs.size());
    for (const Json& v : freqs) f.push_back(read_number(v, "frequency"));
    return FrequencyTable(std::move(ensemble), std::move(f), n_shots);
}

Json factor_to_json(const FactorMatrix& u) {
    Json doc;
    doc["n"] = qubit_count(u.rows());
    doc["rank"] = u.cols();
    std::vector<double> re(static_cast<std::size_t>(u.size()));
    std::vector<double> im(re.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        re[i] = u.data()[i].real();
        im[i] = u.data()[i].imag();
    }
    doc["re"] = std::move(re);
    doc["im"] = std::move(im);
    return doc;
}

FactorMatrix factor_from_json(const Json& doc) {
    const int n = read_qubits(doc);
    const Json& rank = field(doc, "rank");
    if (!rank.is_number_integer() || rank.get<std::int64_t>() < 1) fail("field 'rank' must be positive");
    const Eigen::Index d = Eigen::Index{1} << n;
    const Eigen::Index r = rank.get<Eigen::Index>();
    const Json& re = field(doc, "re");
    const Json& im = field(doc, "im");
    const auto size = static_cast<std::size_t>(d * r);
    if (!re.is_array() || !im.is_array() || re.size() != size || im.size() != size) {
        fail("fields 're' and 'im' must hold d * rank entries");
    }
    FactorMatrix u(d, r);
    for (std::size_t i = 0; i < size; ++i) {
        const double a = read_number(re[i], "re");
        const double b = read_number(im[i], "im");
        if (!std::isfinite(a) || !std::isfinite(b)) fail("factor entries must be finite");
        u.data()[i] = Complex(a, b);
    }
    return u;
}

Json certificate_to_json(const Certificate& cert) {
    Json doc;
    doc["bound"] = cert.bound;
    doc["trace_term"] = cert.trace_term;
    doc["mu"] = cert.mu;
    doc["min_eig"] = cert.min_eig;
    doc["method"] = std::string(to_string(cert.method));
    if (cert.method == EigenMethod::lanczos) {
        doc["lanczos_residual"] = cert.lanczos_residual;
        doc["lanczos_iterations"] = cert.lanczos_iterations;
        doc["converged"] = cert.converged;
    }
    return doc;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        fail("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << doc.dump() << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string validate_document(const Json& doc, int cap) {
    if (!doc.is_object()) fail("document must be a JSON object");
    if (doc.contains("freqs")) {
        frequencies_from_json(doc, cap);
        return "frequencies";
    }
    if (doc.contains("re") || doc.contains("im")) {
        factor_from_json(doc);
        return "factor";
    }
    if (doc.contains("bound")) {
        for (const char* key : {"bound", "trace_term", "mu"}) {
            if (!field(doc, key).is_number()) fail(std::string("field '") + key + "' must be numeric");
        }
        if (!field(doc, "method").is_string()) fail("field 'method' must be a string");
        try {
            parse_eigen_method(doc.at("method").get<std::string>());
        } catch (const DomainError& e) {
            fail(e.what());
        }
        if (doc.at("mu").get<double>() < 0.0) fail("field 'mu' must be non-negative");
        return "certificate";
    }
    if (doc.contains("dense") || doc.contains("factors")) {
        state_from_json(doc);
        return "state";
    }
    if (doc.contains("family")) {
        ensemble_from_json(doc, cap);
        return "ensemble";
    }
    if (doc.contains("termination")) {
        for (const char* key : {"objective", "nll", "factor_norm", "lambda", "seconds"}) {
            if (!field(doc, key).is_number()) fail(std::string("field '") + key + "' must be numeric");
        }
        if (doc.contains("certificate")) validate_document(doc.at("certificate"), cap);
        return "report";
    }
    fail("unrecognized document");
}

} // namespace qst::io
