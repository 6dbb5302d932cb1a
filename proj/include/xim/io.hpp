#ifndef XIM_IO_HPP
#define XIM_IO_HPP

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file io.hpp
 *
 * @brief Delimited-text ingestion (datasets, dissimilarity matrices, lattice
 * coordinates), the versioned model file, embedding files and the training
 * log. All numeric output is written with 17 significant digits so files
 * round-trip exactly.
 */

namespace xim {

/** Options for delimited dataset parsing. */
struct LoadOptions {
    bool has_header = false;
    int label_column = -1;  ///< 0-based column index holding integer labels; -1 = none
};

namespace internal {

inline std::vector<std::string> split_fields(const std::string& line) {
    // Comma-delimited if any comma is present, whitespace-delimited otherwise.
    std::vector<std::string> fields;
    if (line.find(',') != std::string::npos) {
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) {
            // trim surrounding blanks
            size_t a = field.find_first_not_of(" \t\r");
            size_t b = field.find_last_not_of(" \t\r");
            fields.push_back(a == std::string::npos ? std::string() : field.substr(a, b - a + 1));
        }
        if (!line.empty() && line.back() == ',') {
            fields.push_back("");
        }
    } else {
        std::stringstream ss(line);
        std::string field;
        while (ss >> field) {
            fields.push_back(field);
        }
    }
    return fields;
}

inline bool blank_or_comment(const std::string& line) {
    const size_t a = line.find_first_not_of(" \t\r");
    return a == std::string::npos || line[a] == '#';
}

inline double parse_cell(const std::string& field, size_t row, size_t col) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ParseError("cannot parse '" + field + "' as a number at (row " + std::to_string(row) + ", column " + std::to_string(col) + ")");
    }
    if (!std::isfinite(v)) {
        throw DomainError("non-finite value at (row " + std::to_string(row) + ", column " + std::to_string(col) + ")");
    }
    return v;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

} // namespace internal

/**
 * Parse a delimited numeric matrix from a stream: comma- or
 * whitespace-delimited rows, '#' comments and blank lines skipped. Row and
 * column positions in error messages are 1-based over non-skipped lines.
 */
inline Matrix read_matrix(std::istream& in) {
    std::vector<double> values;
    size_t cols = 0;
    size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (internal::blank_or_comment(line)) {
            continue;
        }
        const std::vector<std::string> fields = internal::split_fields(line);
        if (fields.empty()) {
            continue;
        }
        ++rows;
        if (cols == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            throw StructureError("ragged row " + std::to_string(rows) + ": expected " + std::to_string(cols) + " fields, found " + std::to_string(fields.size()));
        }
        for (size_t c = 0; c < fields.size(); ++c) {
            values.push_back(internal::parse_cell(fields[c], rows, c + 1));
        }
    }
    if (rows == 0) {
        throw StructureError("no data rows found");
    }
    return Matrix(rows, cols, std::move(values));
}

/** Parse a dataset from a stream, honoring header and label-column options. */
inline Dataset read_dataset(std::istream& in, const LoadOptions& options = {}) {
    Dataset data;
    std::vector<double> values;
    size_t feature_cols = 0;
    size_t rows = 0;
    bool header_pending = options.has_header;
    std::string line;
    while (std::getline(in, line)) {
        if (internal::blank_or_comment(line)) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const std::vector<std::string> fields = internal::split_fields(line);
        if (fields.empty()) {
            continue;
        }
        if (options.label_column >= 0 && static_cast<size_t>(options.label_column) >= fields.size()) {
            throw StructureError("label column " + std::to_string(options.label_column) + " out of range for row with " + std::to_string(fields.size()) + " fields");
        }
        ++rows;
        size_t fc = 0;
        for (size_t c = 0; c < fields.size(); ++c) {
            if (options.label_column >= 0 && c == static_cast<size_t>(options.label_column)) {
                const double lbl = internal::parse_cell(fields[c], rows, c + 1);
                data.labels.push_back(static_cast<int>(lbl));
                continue;
            }
            values.push_back(internal::parse_cell(fields[c], rows, c + 1));
            ++fc;
        }
        if (feature_cols == 0) {
            feature_cols = fc;
        } else if (fc != feature_cols) {
            throw StructureError("ragged row " + std::to_string(rows) + ": expected " + std::to_string(feature_cols) + " feature fields, found " + std::to_string(fc));
        }
    }
    if (rows == 0) {
        throw StructureError("no data rows found");
    }
    data.points = Matrix(rows, feature_cols, std::move(values));
    data.validate();
    return data;
}

/** Load a dataset from a delimited text file. */
inline Dataset load_dataset(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in = internal::open_input(path);
    return read_dataset(in, options);
}

/** Load a square dissimilarity matrix from a delimited text file. */
inline DissimilarityMatrix load_dissimilarity(const std::string& path) {
    std::ifstream in = internal::open_input(path);
    return make_dissimilarity(read_matrix(in));
}

/** Load explicit lattice node coordinates (one node per row). */
inline Matrix load_lattice_nodes(const std::string& path) {
    std::ifstream in = internal::open_input(path);
    return read_matrix(in);
}

/** Write a matrix as comma-delimited text at full precision. */
inline void write_matrix(std::ostream& os, const Matrix& m) {
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t c = 0; c < m.cols(); ++c) {
            if (c > 0) {
                os << ',';
            }
            os << format_double(m(i, c));
        }
        os << '\n';
    }
}

/** Write a dataset; labels (when present) go into a trailing column. */
inline void write_dataset(std::ostream& os, const Dataset& data) {
    for (size_t i = 0; i < data.n(); ++i) {
        for (size_t c = 0; c < data.dims(); ++c) {
            if (c > 0) {
                os << ',';
            }
            os << format_double(data.points(i, c));
        }
        if (!data.labels.empty()) {
            os << ',' << data.labels[i];
        }
        os << '\n';
    }
}

/**
 * @brief On-disk model: method tag, seed, config echo, lattice, prototypes
 * and (for median models) the per-node median item indices.
 */
struct ModelFile {
    std::string method;
    uint64_t seed = 0;
    std::vector<std::string> config_echo;  ///< key=value lines reproduced verbatim
    Lattice lattice;
    PrototypeSet prototypes;
    std::vector<size_t> medians;           ///< empty unless a median model
};

inline constexpr const char* kModelMagic = "XIM-MODEL v1";

/** Serialize a model (leading magic line, then sections in fixed order). */
inline void write_model(std::ostream& os, const ModelFile& model) {
    os << kModelMagic << '\n';
    os << "method " << model.method << '\n';
    os << "seed " << model.seed << '\n';
    for (const std::string& kv : model.config_echo) {
        os << "config " << kv << '\n';
    }
    os << "lattice " << model.lattice.m() << ' ' << model.lattice.dims() << '\n';
    write_matrix(os, model.lattice.nodes);
    os << "prototypes " << model.prototypes.m() << ' ' << model.prototypes.dims() << '\n';
    write_matrix(os, model.prototypes.w);
    if (!model.medians.empty()) {
        os << "medians " << model.medians.size() << '\n';
        for (size_t i = 0; i < model.medians.size(); ++i) {
            os << model.medians[i] << '\n';
        }
    }
    os << "end\n";
}

inline void save_model(const std::string& path, const ModelFile& model) {
    std::ofstream out = internal::open_output(path);
    write_model(out, model);
}

namespace internal {

inline Matrix read_matrix_rows(std::istream& in, size_t rows, size_t cols, const char* what) {
    Matrix m(rows, cols);
    std::string line;
    for (size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw StructureError(std::string("model file truncated inside ") + what);
        }
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != cols) {
            throw StructureError(std::string("bad ") + what + " row " + std::to_string(i + 1) + ": expected " + std::to_string(cols) + " fields");
        }
        for (size_t c = 0; c < cols; ++c) {
            m(i, c) = parse_cell(fields[c], i + 1, c + 1);
        }
    }
    return m;
}

} // namespace internal

/** Parse a model file; rejects unknown versions and malformed sections. */
inline ModelFile read_model(std::istream& in) {
    ModelFile model;
    std::string line;
    if (!std::getline(in, line) || line != kModelMagic) {
        throw StructureError(std::string("not a model file (expected leading '") + kModelMagic + "' line)");
    }
    bool saw_lattice = false, saw_protos = false;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string key;
        ss >> key;
        if (key.empty()) {
            continue;
        }
        if (key == "end") {
            break;
        }
        if (key == "method") {
            ss >> model.method;
        } else if (key == "seed") {
            ss >> model.seed;
        } else if (key == "config") {
            std::string rest;
            std::getline(ss, rest);
            const size_t a = rest.find_first_not_of(' ');
            model.config_echo.push_back(a == std::string::npos ? rest : rest.substr(a));
        } else if (key == "lattice") {
            size_t m = 0, d = 0;
            ss >> m >> d;
            if (m < 1 || d < 1) {
                throw StructureError("bad lattice header in model file");
            }
            model.lattice = lattice_from_nodes(internal::read_matrix_rows(in, m, d, "lattice"));
            saw_lattice = true;
        } else if (key == "prototypes") {
            size_t m = 0, d = 0;
            ss >> m;
            ss >> d;
            if (m < 1) {
                throw StructureError("bad prototypes header in model file");
            }
            model.prototypes.w = (d == 0) ? Matrix(m, 0) : internal::read_matrix_rows(in, m, d, "prototypes");
            saw_protos = true;
        } else if (key == "medians") {
            size_t m = 0;
            ss >> m;
            model.medians.resize(m);
            for (size_t i = 0; i < m; ++i) {
                if (!(in >> model.medians[i])) {
                    throw StructureError("model file truncated inside medians");
                }
            }
            std::getline(in, line);  // consume the rest of the last median line
        } else {
            throw StructureError("unknown model file section '" + key + "'");
        }
    }
    if (!saw_lattice || !saw_protos) {
        throw StructureError("model file is missing a lattice or prototypes section");
    }
    if (model.prototypes.m() != model.lattice.m()) {
        throw StructureError("model file lattice and prototypes disagree on node count");
    }
    return model;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in = internal::open_input(path);
    return read_model(in);
}

/** @brief An embedding read back from disk. */
struct EmbeddingFile {
    Matrix coords;
    std::vector<std::string> ids;
    std::vector<int> labels;  ///< empty when the file carries no labels
};

/**
 * Write an embedding: a header line naming the columns (id, y0..y{d-1} and
 * optionally label), then one comma-delimited row per point. Ids default to
 * the row index.
 */
inline void write_embedding(std::ostream& os, const Matrix& coords, const std::vector<std::string>& ids, const std::vector<int>& labels) {
    os << "id";
    for (size_t c = 0; c < coords.cols(); ++c) {
        os << ",y" << c;
    }
    if (!labels.empty()) {
        os << ",label";
    }
    os << '\n';
    for (size_t i = 0; i < coords.rows(); ++i) {
        if (ids.empty()) {
            os << i;
        } else {
            os << ids[i];
        }
        for (size_t c = 0; c < coords.cols(); ++c) {
            os << ',' << format_double(coords(i, c));
        }
        if (!labels.empty()) {
            os << ',' << labels[i];
        }
        os << '\n';
    }
}

/** Read an embedding file written by write_embedding. */
inline EmbeddingFile read_embedding(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw StructureError("empty embedding file");
    }
    const std::vector<std::string> header = internal::split_fields(line);
    size_t coord_cols = 0;
    int id_col = -1, label_col = -1;
    std::vector<int> coord_map(header.size(), -1);
    for (size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "id") {
            id_col = static_cast<int>(c);
        } else if (header[c] == "label") {
            label_col = static_cast<int>(c);
        } else if (header[c].size() >= 2 && header[c][0] == 'y') {
            coord_map[c] = static_cast<int>(coord_cols++);
        } else {
            throw StructureError("unknown embedding column '" + header[c] + "'");
        }
    }
    if (coord_cols == 0) {
        throw StructureError("embedding file has no coordinate columns");
    }

    EmbeddingFile out;
    std::vector<double> values;
    size_t rows = 0;
    while (std::getline(in, line)) {
        if (internal::blank_or_comment(line)) {
            continue;
        }
        const std::vector<std::string> fields = internal::split_fields(line);
        if (fields.size() != header.size()) {
            throw StructureError("embedding row " + std::to_string(rows + 1) + " does not match the header");
        }
        ++rows;
        for (size_t c = 0; c < fields.size(); ++c) {
            if (static_cast<int>(c) == id_col) {
                out.ids.push_back(fields[c]);
            } else if (static_cast<int>(c) == label_col) {
                out.labels.push_back(static_cast<int>(internal::parse_cell(fields[c], rows, c + 1)));
            } else if (coord_map[c] >= 0) {
                values.push_back(internal::parse_cell(fields[c], rows, c + 1));
            }
        }
    }
    if (rows == 0) {
        throw StructureError("embedding file has no rows");
    }
    out.coords = Matrix(rows, coord_cols, std::move(values));
    return out;
}

inline EmbeddingFile load_embedding(const std::string& path) {
    std::ifstream in = internal::open_input(path);
    return read_embedding(in);
}

} // namespace xim

#endif
