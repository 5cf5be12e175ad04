#include "binio.hpp"
#include "qap/linalg.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

namespace qap {

void write_matrix(const std::string& path, const DenseMatrix& X)
{
    auto f = detail::open_out(path, "QAPM");
    detail::put_u64(f, static_cast<std::uint64_t>(X.rows()));
    detail::put_u64(f, static_cast<std::uint64_t>(X.cols()));
    detail::put_f64(f, X.data(), static_cast<std::size_t>(X.size()));
}

DenseMatrix read_matrix(const std::string& path)
{
    auto f = detail::open_in(path, "QAPM");
    auto m = detail::get_u64(f);
    auto n = detail::get_u64(f);
    DenseMatrix X(static_cast<Index>(m), static_cast<Index>(n));
    detail::get_f64(f, X.data(), m * n);
    return X;
}

void write_matrix_csv(const std::string& path, const DenseMatrix& X)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << std::setprecision(17);
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < X.cols(); ++j) {
            if (j) f << ',';
            f << X(i, j);
        }
        f << '\n';
    }
}

DenseMatrix read_matrix_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0;
            auto b = cell.data(), e = cell.data() + cell.size();
            while (b < e && *b == ' ') ++b;
            auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc()) throw std::runtime_error(path + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows[0].size()) throw std::runtime_error(path + ": ragged rows");
        rows.push_back(std::move(row));
    }
    DenseMatrix X(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j) X(i, j) = rows[i][j];
    return X;
}

}  // namespace qap
