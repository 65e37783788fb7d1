#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fractop/errors.hpp"
#include "fractop/leveled.hpp"
#include "fractop/measure.hpp"
#include "fractop/operators.hpp"

namespace fractop {

/// Shortest round-trippable decimal form; deterministic for a fixed libc.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Write-to-temp-then-rename so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

/// EmpiricalMeasure export: header x_0,...,x_{d-1}, one point per row.
inline void write_points_csv(const EmpiricalMeasure& m, const std::filesystem::path& path) {
    std::string out;
    const Eigen::Index d = m.points.cols();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (j) out += ',';
        out += "x_" + std::to_string(j);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < m.points.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (j) out += ',';
            out += format_double(m.points(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

/// LeveledVector export: word,coefficient_re,coefficient_im (empty word = "").
inline void write_leveled_csv(const LeveledVector& v, const std::filesystem::path& path) {
    std::string out = "word,coefficient_re,coefficient_im\n";
    for (Eigen::Index r = 0; r < v.coeffs.size(); ++r) {
        out += word_to_string(rank_to_word(static_cast<std::size_t>(r), v.level, v.n));
        out += ',' + format_double(v.coeffs[r].real());
        out += ',' + format_double(v.coeffs[r].imag());
        out += '\n';
    }
    write_file_atomic(path, out);
}

/// Dense operator export: row index = codomain word rank, column = domain
/// word rank; complex entries serialized as re+imi.
inline void write_operator_csv(const Eigen::MatrixXcd& mat, const std::filesystem::path& path) {
    std::string out;
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            if (c) out += ',';
            out += format_double(mat(r, c).real());
            if (mat(r, c).imag() >= 0) out += '+';
            out += format_double(mat(r, c).imag()) + "i";
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace fractop
