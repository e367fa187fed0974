// JSON state files, RFC-4180 CSV emission, and the provenance envelope shared
// by every artifact the CLI writes. Formatting is fixed so identical runs
// produce identical bytes.
#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qcorr/errors.hpp"
#include "qcorr/state.hpp"
#include "qcorr/version.hpp"

namespace qcorr {

using json = nlohmann::json;

// %.12g keeps full working precision while staying stable across runs.
inline std::string format_double(double x) {
    if (x == 0.0) x = 0.0;  // fold -0 into 0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// State files: {"dims":[2,2],"re":[[...]],"im":[[...]]}, row-major.

inline json state_to_json(const DensityMatrix& rho) {
    json dims = json::array();
    for (auto d : rho.dims) dims.push_back(static_cast<int>(d));
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (Eigen::Index j = 0; j < rho.dim(); ++j) {
            rrow.push_back(rho.mat(i, j).real());
            irow.push_back(rho.mat(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"dims", std::move(dims)}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline DensityMatrix state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("re") || !j.contains("im"))
        throw ParseError("state json: need object with dims, re, im");
    std::vector<Eigen::Index> dims;
    for (const auto& d : j.at("dims")) {
        if (!d.is_number_integer() || d.get<int>() < 1)
            throw ParseError("state json: dims must be positive integers");
        dims.push_back(d.get<int>());
    }
    Eigen::Index n = 1;
    for (auto d : dims) n *= d;
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (!re.is_array() || !im.is_array() || static_cast<Eigen::Index>(re.size()) != n ||
        static_cast<Eigen::Index>(im.size()) != n)
        throw ParseError("state json: re/im must be n x n arrays matching dims");
    CMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& rrow = re.at(i);
        const json& irow = im.at(i);
        if (static_cast<Eigen::Index>(rrow.size()) != n ||
            static_cast<Eigen::Index>(irow.size()) != n)
            throw ParseError("state json: ragged re/im rows");
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!rrow.at(k).is_number() || !irow.at(k).is_number())
                throw ParseError("state json: matrix entries must be numbers");
            m(i, k) = cplx(rrow.at(k).get<double>(), irow.at(k).get<double>());
        }
    }
    return make_density_matrix(std::move(m), std::move(dims));  // validates the physics
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw ParseError("bad json in '" + path + "': " + e.what());
    }
}

// Accepts bare state objects and enveloped artifacts alike, so everything the
// CLI writes loads back through the same door.
inline DensityMatrix load_state(const std::string& path) {
    json j = load_json_file(path);
    const json* node = &j;
    if (!node->contains("dims") && node->contains("payload")) node = &node->at("payload");
    if (!node->contains("dims") && node->contains("state")) node = &node->at("state");
    return state_from_json(*node);
}

inline void save_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ParseError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// CSV with RFC-4180 quoting; \n line endings for plotting friendliness.

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv(const CsvTable& t) {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    return out;
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, had_any = false;
    auto end_field = [&]() {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&](std::vector<std::string>&& r) {
        if (!had_any) {
            t.header = std::move(r);
            had_any = true;
        } else {
            t.rows.push_back(std::move(r));
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_field();
            end_row(std::move(row));
            row.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("csv: unterminated quoted field");
    if (!field.empty() || !row.empty()) {
        end_field();
        end_row(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Provenance envelope: payload + how it was produced. Timestamps are opt-in
// so identical argv+seed reruns stay byte-identical.

struct Provenance {
    std::vector<std::string> command;
    json defaults = json::object();
    std::uint64_t seed = 0;
    std::optional<std::string> timestamp;
};

inline json envelope(json payload, const Provenance& p) {
    json prov{{"artifact", artifact_name},
              {"artifact_version", artifact_version},
              {"command", p.command},
              {"defaults", p.defaults},
              {"seed", p.seed}};
    if (p.timestamp) prov["timestamp"] = *p.timestamp;
    return json{{"payload", std::move(payload)}, {"provenance", std::move(prov)}};
}

inline json load_envelope(const std::string& path) {
    json j = load_json_file(path);
    if (!j.is_object() || !j.contains("payload") || !j.contains("provenance"))
        throw ParseError("'" + path + "' is not an enveloped artifact");
    const json& prov = j.at("provenance");
    for (const char* key : {"artifact_version", "command", "seed"})
        if (!prov.contains(key))
            throw ParseError("'" + path + "' envelope is missing provenance field '" +
                             std::string(key) + "'");
    return j;
}

} // namespace qcorr
