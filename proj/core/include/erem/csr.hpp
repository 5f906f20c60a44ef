#pragma once

#include "erem/types.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>
#include <vector>

namespace erem {

/// Sparse matrix in CSR format with owned storage. Rows are built from
/// (row, col, value) triplets; duplicate entries are summed.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> values;

    int nnz() const { return static_cast<int>(values.size()); }

    static CsrMatrix from_triplets(int rows, int cols,
                                   std::vector<std::tuple<int, int, double>> triplets) {
        std::sort(triplets.begin(), triplets.end(),
                  [](const auto& a, const auto& b) {
                      return std::tie(std::get<0>(a), std::get<1>(a)) <
                             std::tie(std::get<0>(b), std::get<1>(b));
                  });
        CsrMatrix m;
        m.rows = rows;
        m.cols = cols;
        m.row_ptr.assign(rows + 1, 0);
        for (std::size_t k = 0; k < triplets.size();) {
            const int i = std::get<0>(triplets[k]);
            const int j = std::get<1>(triplets[k]);
            double v = 0.0;
            while (k < triplets.size() && std::get<0>(triplets[k]) == i &&
                   std::get<1>(triplets[k]) == j) {
                v += std::get<2>(triplets[k]);
                ++k;
            }
            m.col_idx.push_back(j);
            m.values.push_back(v);
            ++m.row_ptr[i + 1];
        }
        for (int i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
        return m;
    }

    /// y = A x
    void multiply(const Vec& x, Vec& y) const {
        y.resize(rows);
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
            y[i] = s;
        }
    }

    Vec operator*(const Vec& x) const {
        Vec y;
        multiply(x, y);
        return y;
    }

    Vec diagonal() const {
        Vec d = Vec::Zero(std::min(rows, cols));
        for (int i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                if (col_idx[k] == i) d[i] = values[k];
        return d;
    }

    Vec row_sums() const {
        Vec s = Vec::Zero(rows);
        for (int i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s[i] += values[k];
        return s;
    }

    /// Largest absolute row sum, a bound on the operator infinity-norm.
    double inf_norm() const {
        double n = 0.0;
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::abs(values[k]);
            n = std::max(n, s);
        }
        return n;
    }

    Mat dense() const {
        Mat d = Mat::Zero(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d(i, col_idx[k]) += values[k];
        return d;
    }

    /// Coordinate-format text dump (row col value per line), for debugging.
    void dump_coordinate(std::ostream& os) const {
        os.precision(17);
        for (int i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                os << i << ' ' << col_idx[k] << ' ' << values[k] << '\n';
    }
};

} // namespace erem
