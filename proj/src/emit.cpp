#include "fmm/emit.hpp"

#include <cstdlib>
#include <sstream>

namespace fmm {

namespace {

using json = nlohmann::ordered_json;

json mat_to_json(const IntMat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

IntMat mat_from_json(const json& j, const char* name, int want_rows, int want_cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != want_rows)
        throw ParseError(std::string(name) + ": expected " + std::to_string(want_rows) + " rows");
    IntMat m(want_rows, want_cols);
    for (int r = 0; r < want_rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != want_cols)
            throw ParseError(std::string(name) + " row " + std::to_string(r + 1) + ": expected " +
                             std::to_string(want_cols) + " integer columns");
        for (int c = 0; c < want_cols; ++c) {
            if (!row[c].is_number_integer())
                throw ParseError(std::string(name) + "[" + std::to_string(r + 1) + "][" +
                                 std::to_string(c + 1) + "]: expected an integer");
            m.at(r, c) = row[c].get<int>();
        }
    }
    return m;
}

}  // namespace

std::string to_json(const SolutionDocument& doc) {
    json j;
    j["schema_version"] = doc.schema_version;
    j["dims"] = {{"n", doc.factors.dims.n}, {"m", doc.factors.dims.m}, {"p", doc.factors.dims.p}};
    j["rank"] = doc.factors.rank;
    j["field"] = doc.field.values;
    j["u"] = mat_to_json(doc.factors.u);
    j["v"] = mat_to_json(doc.factors.v);
    j["w"] = mat_to_json(doc.factors.w);
    j["provenance"] = doc.provenance;
    j["verified"] = doc.verified;
    return j.dump(2) + "\n";
}

LoadResult from_json(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());  // nlohmann reports the byte position
    }

    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
        return j[key];
    };

    LoadResult out;
    SolutionDocument& doc = out.doc;
    try {
        doc.schema_version = need("schema_version").get<int>();
        if (doc.schema_version != 1)
            throw ParseError("unsupported schema_version " + std::to_string(doc.schema_version));
        const json& jd = need("dims");
        const Dims dims(jd.at("n").get<int>(), jd.at("m").get<int>(), jd.at("p").get<int>());
        const int rank = need("rank").get<int>();
        if (rank < 0) throw ParseError("rank must be >= 0");
        doc.factors.dims = dims;
        doc.factors.rank = rank;
        doc.field.values = need("field").get<std::vector<int>>();
        doc.field.validate();
        doc.factors.u = mat_from_json(need("u"), "u", dims.u_rows(), rank);
        doc.factors.v = mat_from_json(need("v"), "v", dims.v_rows(), rank);
        doc.factors.w = mat_from_json(need("w"), "w", dims.w_rows(), rank);
        doc.provenance = need("provenance");
        doc.verified = need("verified").get<bool>();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(e.what());
    }

    const VerifyResult vr = verify_decomposition(doc.factors, build_target_tensor(doc.factors.dims));
    out.verified_on_load = vr.ok();
    out.violations = vr.violations;
    doc.verified = vr.ok();
    return out;
}

namespace {

void append_terms(std::ostringstream& os, const IntMat& m, int col_or_row, bool by_col,
                  const char* sym) {
    const int count = by_col ? m.rows : m.cols;
    bool first = true;
    for (int idx = 0; idx < count; ++idx) {
        const int coef = by_col ? m.at(idx, col_or_row) : m.at(col_or_row, idx);
        if (coef == 0) continue;
        if (first) {
            if (coef < 0) os << "-";
            first = false;
        } else {
            os << (coef < 0 ? " - " : " + ");
        }
        if (std::abs(coef) != 1) os << std::abs(coef);
        os << sym << (idx + 1);
    }
    if (first) os << "0";
}

}  // namespace

std::string to_readable(const SolutionDocument& doc) {
    const FactorMatrices& f = doc.factors;
    std::ostringstream os;
    for (int r = 0; r < f.rank; ++r) {
        bool u_zero = true, v_zero = true;
        for (int i = 0; i < f.u.rows; ++i) u_zero = u_zero && f.u.at(i, r) == 0;
        for (int j = 0; j < f.v.rows; ++j) v_zero = v_zero && f.v.at(j, r) == 0;
        os << "m" << (r + 1) << " = ";
        if (u_zero || v_zero) {
            os << "0\n";
            continue;
        }
        os << "(";
        append_terms(os, f.u, r, true, "a");
        os << ")(";
        append_terms(os, f.v, r, true, "b");
        os << ")\n";
    }
    for (int k = 0; k < f.w.rows; ++k) {
        os << "c" << (k + 1) << " = ";
        append_terms(os, f.w, k, false, "m");
        os << "\n";
    }
    return os.str();
}

}  // namespace fmm
