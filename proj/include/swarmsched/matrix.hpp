#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swarmsched/errors.hpp"

namespace swarmsched {

// Dense row-major matrix. Instances stay small throughout the library
// (a few hundred rows/columns at most), so this is deliberately plain:
// no views, no expression templates, value semantics everywhere.
template <typename T>
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {
        if (rows < 0 || cols < 0) throw DimensionError("matrix dimensions must be non-negative");
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
        Matrix m(r, c);
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c) throw DimensionError("ragged initializer");
            int j = 0;
            for (const T& v : row) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    T* row_ptr(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
    const T* row_ptr(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using BitMatrix = Matrix<uint8_t>;  // 0/1 entries: adjacency and masks

inline void require_same_shape(const Matrix<double>& a, const Matrix<double>& b, const char* what) {
    if (!a.same_shape(b)) throw DimensionError(std::string(what) + ": shape mismatch");
}

}  // namespace swarmsched
