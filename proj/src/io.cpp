// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/io.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "haflab/errors.hpp"

namespace haflab {

namespace {

Point point_from_json(const Json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
    Point p;
    for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(what + " must be an array of numbers");
        p.push_back(x.get<double>());
    }
    return p;
}

}  // namespace

Grid grid_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("window")) throw ConfigError("grid: missing \"window\"");
    const Json& w = j.at("window");
    if (!w.is_object() || !w.contains("lo") || !w.contains("hi")) {
        throw ConfigError("grid.window needs \"lo\" and \"hi\"");
    }
    Window window{point_from_json(w.at("lo"), "grid.window.lo"), point_from_json(w.at("hi"), "grid.window.hi")};
    if (window.lo.size() != window.hi.size() || window.lo.empty()) {
        throw ConfigError("grid.window.lo and grid.window.hi must have the same nonzero length");
    }
    if (j.contains("centers") || j.contains("volumes")) {
        if (!j.contains("centers") || !j.contains("volumes")) {
            throw ConfigError("grid: \"centers\" and \"volumes\" must be given together");
        }
        std::vector<Point> centers;
        for (const auto& c : j.at("centers")) {
            centers.push_back(c.is_number() ? Point{c.get<double>()} : point_from_json(c, "grid.centers"));
        }
        return Grid::from_cells(std::move(window), std::move(centers),
                                point_from_json(j.at("volumes"), "grid.volumes"));
    }
    if (!j.contains("cells")) throw ConfigError("grid: missing \"cells\"");
    const Json& c = j.at("cells");
    std::vector<int> per_axis;
    if (c.is_number_integer()) {
        per_axis.assign(window.lo.size(), c.get<int>());
    } else if (c.is_array()) {
        for (const auto& x : c) {
            if (!x.is_number_integer()) throw ConfigError("grid.cells must contain integers");
            per_axis.push_back(x.get<int>());
        }
    } else {
        throw ConfigError("grid.cells must be an integer or an array of integers");
    }
    return Grid::uniform(window, per_axis);
}

Json grid_to_json(const Grid& grid) {
    Json j;
    j["window"] = {{"lo", grid.window().lo}, {"hi", grid.window().hi}};
    if (!grid.cells_per_axis().empty()) {
        j["cells"] = grid.cells_per_axis();
    } else {
        Json centers = Json::array();
        for (int m = 0; m < grid.cells(); ++m) centers.push_back(grid.center(m));
        j["centers"] = centers;
        j["volumes"] = std::vector<double>(grid.volumes().begin(), grid.volumes().end());
    }
    return j;
}

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    ComplexMatrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[r];
        if (!row.is_array()) throw ConfigError(what + ": row " + std::to_string(r) + " is not an array");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw DimensionError(what + ": rows have different lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& z = row[c];
            if (z.is_number()) {
                m(r, c) = z.get<double>();
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ConfigError(what + ": entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                  ") is not a number or [re, im] pair");
            }
        }
    }
    return m;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

GaussianFieldModel model_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("model must be a JSON object");
    for (const char* key : {"grid", "L1", "L2"}) {
        if (!j.contains(key)) throw ConfigError(std::string("model: missing \"") + key + "\"");
    }
    Grid grid = grid_from_json(j.at("grid"));
    ComplexMatrix l1 = complex_matrix_from_json(j.at("L1"), "L1");
    ComplexMatrix l2 = complex_matrix_from_json(j.at("L2"), "L2");
    if (j.contains("feature_dim")) {
        const int d = j.at("feature_dim").get<int>();
        if (l1.rows() != d || l2.rows() != d) {
            throw DimensionError("model: L1/L2 row count does not match feature_dim " + std::to_string(d));
        }
    }
    return GaussianFieldModel::from_features(std::move(grid), std::move(l1), std::move(l2));
}

Json model_to_json(const GaussianFieldModel& model) {
    return {{"grid", grid_to_json(model.grid())},
            {"feature_dim", model.feature_dim()},
            {"L1", complex_matrix_to_json(model.L1())},
            {"L2", complex_matrix_to_json(model.L2())}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

GaussianFieldModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_json(read_json_file(path));
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

}  // namespace haflab
