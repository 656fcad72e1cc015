#pragma once

// JSON encodings. A matrix is a flat row-major list of [re, im] pairs; an
// ensemble is {"dim": d, "members": [{"prior": q, "matrix": [...]}, ...]}.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maxconf/certify.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf {

using Json = nlohmann::json;

inline Json matrix_to_json(const ComplexMatrix &m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            out.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return out;
}

inline ComplexMatrix matrix_from_json(const Json &j, std::size_t dim) {
    require(j.is_array() && j.size() == dim * dim, ErrorKind::ParseError,
            "matrix needs " + std::to_string(dim * dim) + " [re, im] entries");
    ComplexMatrix m(dim);
    for (std::size_t k = 0; k < dim * dim; ++k) {
        const Json &e = j[k];
        double re = 0.0, im = 0.0;
        if (e.is_number()) {
            re = e.get<double>();
        } else {
            require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(), ErrorKind::ParseError,
                    "matrix entry must be [re, im]");
            re = e[0].get<double>();
            im = e[1].get<double>();
        }
        m(k / dim, k % dim) = Complex(re, im);
    }
    return m;
}

inline Json ensemble_to_json(const Ensemble &e) {
    Json members = Json::array();
    for (const auto &m : e.members()) {
        members.push_back({{"prior", m.prior}, {"matrix", matrix_to_json(m.state.matrix())}});
    }
    return {{"dim", e.dim()}, {"members", members}};
}

inline Ensemble ensemble_from_json(const Json &j) {
    require(j.is_object() && j.contains("dim") && j.contains("members"), ErrorKind::ParseError,
            "ensemble needs \"dim\" and \"members\"");
    const auto dim = j.at("dim").get<std::size_t>();
    require(dim >= 1 && dim <= ComplexMatrix::kMaxDim, ErrorKind::ParseError, "dim must lie in 1..4");
    std::vector<EnsembleMember> members;
    for (const auto &m : j.at("members")) {
        require(m.contains("prior") && m.contains("matrix"), ErrorKind::ParseError,
                "member needs \"prior\" and \"matrix\"");
        members.push_back({m.at("prior").get<double>(), DensityMatrix(matrix_from_json(m.at("matrix"), dim))});
    }
    return Ensemble(std::move(members));
}

inline Json povm_to_json(const Povm &p) {
    Json elements = Json::array();
    for (const auto &m : p.elements) {
        elements.push_back(matrix_to_json(m));
    }
    return {{"elements", elements}, {"inconclusive", matrix_to_json(p.inconclusive)}};
}

/// The inconclusive element defaults to I - sum(elements).
inline Povm povm_from_json(const Json &j, std::size_t dim) {
    require(j.is_object() && j.contains("elements"), ErrorKind::ParseError, "POVM needs \"elements\"");
    std::vector<ComplexMatrix> elements;
    for (const auto &m : j.at("elements")) {
        elements.push_back(matrix_from_json(m, dim));
    }
    Povm p = Povm::complete(std::move(elements));
    if (j.contains("inconclusive")) {
        p.inconclusive = matrix_from_json(j.at("inconclusive"), dim);
    }
    require(p.is_valid(), ErrorKind::InvalidSpec, "POVM elements must be PSD and sum to the identity");
    return p;
}

inline Json dual_to_json(const DualCertificate &d) {
    Json sigma = Json::array();
    for (const auto &s : d.sigma) {
        sigma.push_back(matrix_to_json(s));
    }
    Json out = {{"K", matrix_to_json(d.K)}, {"s", d.s},   {"r", d.r},
                {"sigma", sigma},           {"r0", d.r0}, {"sigma0", matrix_to_json(d.sigma0)}};
    if (d.qubit) {
        out["lambda"] = d.qubit->lambda;
        out["X1"] = matrix_to_json(d.qubit->x1);
        out["X2"] = matrix_to_json(d.qubit->x2);
    }
    return out;
}

inline Json report_to_json(const CertReport &r) {
    return {{"value", r.value},
            {"branch", std::string(to_string(r.branch))},
            {"rank_two_certified", r.rank_two_certified},
            {"primal", r.primal},
            {"dual_objective", r.dual_objective},
            {"gap", r.gap},
            {"povm", povm_to_json(r.povm)},
            {"dual", dual_to_json(r.dual)}};
}

inline Json general_report_to_json(const GeneralCertReport &r) {
    return {{"lower", r.lower},
            {"upper", r.upper},
            {"width", r.width()},
            {"povm", povm_to_json(r.povm)},
            {"dual", dual_to_json(r.dual)}};
}

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::ParseError, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception &ex) {
        fail(ErrorKind::ParseError, path + ": " + ex.what());
    }
}

}  // namespace maxconf
