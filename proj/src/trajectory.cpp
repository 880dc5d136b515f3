#include "sigsub/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sigsub/csv.hpp"

namespace sigsub {

Matrix embed(const std::vector<double>& values, int window) {
    const int n = static_cast<int>(values.size());
    if (window < 1 || window > n) throw std::invalid_argument("window length must satisfy 1 <= L <= N");
    const int k = n - window + 1;
    Matrix m(window, k);
    for (int i = 0; i < window; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = values[static_cast<std::size_t>(i + j)];
    return m;
}

Matrix hankelize(const Matrix& m) {
    const Eigen::Index rows = m.rows(), cols = m.cols();
    std::vector<double> sums(static_cast<std::size_t>(rows + cols - 1), 0.0);
    std::vector<int> counts(sums.size(), 0);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            sums[static_cast<std::size_t>(i + j)] += m(i, j);
            counts[static_cast<std::size_t>(i + j)] += 1;
        }
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = sums[static_cast<std::size_t>(i + j)] / counts[static_cast<std::size_t>(i + j)];
    return out;
}

std::vector<double> matrix_to_series(const Matrix& m, double rel_tol) {
    const Eigen::Index rows = m.rows(), cols = m.cols();
    const double scale = std::max(1.0, max_norm(m));
    std::vector<double> out(static_cast<std::size_t>(rows + cols - 1));
    for (Eigen::Index s = 0; s < rows + cols - 1; ++s) {
        const Eigen::Index i0 = std::max<Eigen::Index>(0, s - cols + 1);
        out[static_cast<std::size_t>(s)] = m(i0, s - i0);
    }
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (std::abs(m(i, j) - out[static_cast<std::size_t>(i + j)]) > rel_tol * scale)
                throw std::invalid_argument("matrix_to_series: input is not Hankel within tolerance");
    return out;
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Matrix gram;
    if (m.rows() <= m.cols())
        gram = m * m.transpose();
    else
        gram = m.transpose() * m;
    gram = 0.5 * (gram + gram.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

double max_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

void matrix_to_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << fmt17(m(i, j));
        }
        out << '\n';
    }
}

Matrix matrix_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed matrix csv cell '" + cell + "' in " + path);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("ragged matrix csv: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty matrix csv: " + path);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

}  // namespace sigsub
