#ifndef XIM_CORE_HPP
#define XIM_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * @file core.hpp
 *
 * @brief Domain types shared by every other header: matrices, datasets,
 * dissimilarity matrices, lattices, prototype sets, distance specifications,
 * the error hierarchy and the seeded random generator.
 */

namespace xim {

/** @brief Base class for all library errors. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Raised when a cell of an input file cannot be parsed as a number. */
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/** Raised when an input has the wrong overall structure (ragged rows, non-square matrix). */
class StructureError : public Error {
public:
    explicit StructureError(const std::string& msg) : Error(msg) {}
};

/** Raised when a value violates a domain constraint (negative dissimilarity, non-finite entry). */
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/** Raised on dimension mismatches between otherwise valid objects. */
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/** Raised when a configuration value or combination is invalid. */
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/** Raised on filesystem-level failures (missing or unwritable files). */
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/**
 * @brief Dense row-major matrix of doubles.
 *
 * Deliberately minimal: storage, shape and row access. All numerical work in
 * this library runs over raw rows, so no expression arithmetic is provided.
 */
class Matrix {
public:
    Matrix() = default;

    Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(size_t rows, size_t cols, std::vector<double> values) : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != rows_ * cols_) {
            throw ShapeError("matrix storage size does not match rows*cols");
        }
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
    double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    double* row(size_t r) { return data_.data() + r * cols_; }
    const double* row(size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

/** Squared Euclidean distance between two buffers of length @p n. */
inline double squared_euclidean(const double* a, const double* b, size_t n) {
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

/**
 * @brief Counter-style splittable generator (splitmix64).
 *
 * Every random decision in the library flows from one explicit 64-bit seed
 * through this generator, so runs are reproducible bit-exactly on a platform.
 * Substreams for independent tasks are derived with split().
 */
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Requires n >= 1.
    size_t next_index(size_t n) {
        return static_cast<size_t>((static_cast<__uint128_t>(next()) * n) >> 64);
    }

    /// Standard normal deviate (Box-Muller, both uniforms consumed).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0) {
            u1 = 0x1.0p-53;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Derive an independent substream.
    SplitMix64 split() {
        return SplitMix64(next());
    }

private:
    uint64_t state_;
};

/**
 * @brief A finite set of data vectors in the exploration space, with optional
 * integer class labels and optional row identifiers.
 */
struct Dataset {
    Matrix points;                 ///< N x D feature matrix.
    std::vector<int> labels;       ///< empty, or exactly N tags
    std::vector<std::string> ids;  ///< empty, or exactly N identifiers

    size_t n() const { return points.rows(); }
    size_t dims() const { return points.cols(); }

    void validate() const {
        if (points.rows() < 1 || points.cols() < 1) {
            throw StructureError("dataset must have at least one row and one column");
        }
        if (!points.all_finite()) {
            throw DomainError("dataset contains a non-finite value");
        }
        if (!labels.empty() && labels.size() != points.rows()) {
            throw StructureError("label count does not match row count");
        }
        if (!ids.empty() && ids.size() != points.rows()) {
            throw StructureError("id count does not match row count");
        }
    }
};

/**
 * @brief Square matrix of pairwise dissimilarities.
 *
 * Symmetry is not required (non-metric inputs are allowed); the constructor
 * records whether the matrix happened to be symmetric.
 */
struct DissimilarityMatrix {
    Matrix values;
    bool symmetric = true;

    size_t n() const { return values.rows(); }
};

/**
 * Validate a square matrix as a dissimilarity matrix. Diagonal entries below
 * 1e-12 in magnitude are forced to exactly zero; anything larger is an error,
 * as are negative or non-finite entries.
 */
inline DissimilarityMatrix make_dissimilarity(Matrix values) {
    if (values.rows() != values.cols()) {
        throw StructureError("dissimilarity matrix must be square");
    }
    const size_t n = values.rows();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const double v = values(i, j);
            if (!std::isfinite(v)) {
                throw DomainError("dissimilarity matrix contains a non-finite value");
            }
            if (v < 0) {
                throw DomainError("negative dissimilarity at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
        if (values(i, i) > 1e-12) {
            throw DomainError("nonzero diagonal entry at row " + std::to_string(i));
        }
        values(i, i) = 0;
    }
    bool symmetric = true;
    for (size_t i = 0; i < n && symmetric; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (values(i, j) != values(j, i)) {
                symmetric = false;
                break;
            }
        }
    }
    return DissimilarityMatrix{std::move(values), symmetric};
}

/** Lattice construction variants. */
enum class Topology { RECTANGULAR, HEXAGONAL, EXPLICIT };

inline const char* topology_name(Topology t) {
    switch (t) {
        case Topology::RECTANGULAR: return "rectangular";
        case Topology::HEXAGONAL: return "hexagonal";
        default: return "explicit";
    }
}

/**
 * @brief Fixed node coordinates in the ordering space, plus a cache of all
 * pairwise squared Euclidean node distances.
 *
 * The node arrangement is the structure hypothesis of the mapping: it is
 * chosen before training and never moves.
 */
struct Lattice {
    Matrix nodes;       ///< M x d node coordinates.
    Topology topology = Topology::EXPLICIT;
    Matrix node_dist;   ///< M x M cache of d_O values (squared Euclidean).

    size_t m() const { return nodes.rows(); }
    size_t dims() const { return nodes.cols(); }

    /// Cached ordering-space distance between nodes @p a and @p b.
    double dist(size_t a, size_t b) const { return node_dist(a, b); }
};

namespace internal {

inline Matrix node_distance_cache(const Matrix& nodes) {
    const size_t m = nodes.rows();
    Matrix cache(m, m);
    for (size_t i = 0; i < m; ++i) {
        cache(i, i) = 0;
        for (size_t j = i + 1; j < m; ++j) {
            const double d = squared_euclidean(nodes.row(i), nodes.row(j), nodes.cols());
            cache(i, j) = d;
            cache(j, i) = d;
        }
    }
    return cache;
}

} // namespace internal

/**
 * Build a regular grid lattice of rows x cols nodes.
 *
 * Rectangular grids place nodes at integer coordinates with unit spacing.
 * Hexagonal grids shift odd rows by 0.5 and compress the row pitch to
 * sqrt(3)/2, giving unit distance between all adjacent nodes.
 */
inline Lattice build_lattice(size_t rows, size_t cols, Topology topology = Topology::RECTANGULAR) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw ConfigError("lattice needs rows >= 1, cols >= 1 and rows*cols >= 2");
    }
    if (topology == Topology::EXPLICIT) {
        throw ConfigError("explicit topology requires a node coordinate matrix");
    }
    Matrix nodes(rows * cols, 2);
    const double row_pitch = (topology == Topology::HEXAGONAL) ? std::sqrt(3.0) / 2.0 : 1.0;
    size_t idx = 0;
    for (size_t i = 0; i < rows; ++i) {
        const double offset = (topology == Topology::HEXAGONAL && (i % 2 == 1)) ? 0.5 : 0.0;
        for (size_t j = 0; j < cols; ++j, ++idx) {
            nodes(idx, 0) = static_cast<double>(i) * row_pitch;
            nodes(idx, 1) = static_cast<double>(j) + offset;
        }
    }
    Lattice lat;
    lat.nodes = std::move(nodes);
    lat.topology = topology;
    lat.node_dist = internal::node_distance_cache(lat.nodes);
    return lat;
}

/** Build a lattice from explicit node coordinates (one node per row). */
inline Lattice lattice_from_nodes(Matrix nodes) {
    if (nodes.rows() < 1) {
        throw ConfigError("lattice needs at least one node");
    }
    if (!nodes.all_finite()) {
        throw DomainError("lattice node coordinates must be finite");
    }
    Lattice lat;
    lat.nodes = std::move(nodes);
    lat.topology = Topology::EXPLICIT;
    lat.node_dist = internal::node_distance_cache(lat.nodes);
    return lat;
}

/**
 * @brief Learnable prototype vectors in the exploration space, one per
 * lattice node (row parity with the lattice is checked at use sites).
 */
struct PrototypeSet {
    Matrix w;  ///< M x D prototype matrix.

    size_t m() const { return w.rows(); }
    size_t dims() const { return w.cols(); }
};

/** Which exploration-space distance a routine should use. */
enum class DistanceKind { SQUARED_EUCLIDEAN, PRECOMPUTED };

/**
 * @brief Distance specification for the exploration space.
 *
 * Either squared Euclidean on vector pairs, or a handle to a precomputed
 * dissimilarity matrix indexed by data item. Routines that require vectors
 * (prototype updates, Shepard mapping) reject the precomputed kind.
 */
struct DistanceSpec {
    DistanceKind kind = DistanceKind::SQUARED_EUCLIDEAN;
    const DissimilarityMatrix* precomputed = nullptr;

    static DistanceSpec squared_euclidean_spec() { return DistanceSpec{}; }

    static DistanceSpec precomputed_spec(const DissimilarityMatrix& d) {
        return DistanceSpec{DistanceKind::PRECOMPUTED, &d};
    }

    /// Distance between two vectors; only valid for the squared Euclidean kind.
    double between(const double* a, const double* b, size_t n) const {
        if (kind != DistanceKind::SQUARED_EUCLIDEAN) {
            throw ConfigError("operation requires a vectorial (squared Euclidean) distance");
        }
        return xim::squared_euclidean(a, b, n);
    }

    /// Distance between data items i and k by index.
    double between_items(const Dataset& data, size_t i, size_t k) const {
        if (kind == DistanceKind::SQUARED_EUCLIDEAN) {
            return xim::squared_euclidean(data.points.row(i), data.points.row(k), data.dims());
        }
        return precomputed->values(i, k);
    }
};

/** Format a double with enough digits to round-trip exactly. */
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/** Shorter float formatting for human-facing output. */
inline std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace xim

#endif
