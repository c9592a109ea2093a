#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <vector>

#include "vmma/matrix.hpp"

namespace vmma {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Regular square lattice: node (i, j) sits at origin + (i, j) * spacing.
class Grid {
public:
    Grid() = default;
    Grid(Point origin, double spacing, std::size_t rows, std::size_t cols);

    Point origin() const noexcept { return origin_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_ * cols_; }
    Point node(std::size_t i, std::size_t j) const;

    // Same spacing, grown by `border` cells on every side.
    Grid enlarged(std::size_t border) const;

private:
    Point origin_{};
    double spacing_ = 1.0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

// Validates and builds a grid. Non-positive spacing or sizes throw ParameterError.
Grid make_grid(Point origin, double spacing, long rows, long cols);

// Values on a grid with an observation mask. Masked-out cells are missing.
class Field {
public:
    Field() = default;
    explicit Field(Grid grid);
    Field(Grid grid, Matrix values);
    Field(Grid grid, Matrix values, std::vector<std::uint8_t> mask);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t rows() const noexcept { return grid_.rows(); }
    std::size_t cols() const noexcept { return grid_.cols(); }
    double spacing() const noexcept { return grid_.spacing(); }

    bool observed(std::size_t i, std::size_t j) const { return mask_[i * cols() + j] != 0; }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    void set(std::size_t i, std::size_t j, double v);
    void set_missing(std::size_t i, std::size_t j);

    const Matrix& values() const noexcept { return values_; }
    // Raw access; leaves the mask untouched.
    Matrix& mutable_values() noexcept { return values_; }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
    std::size_t count_observed() const;

private:
    Grid grid_;
    Matrix values_;
    std::vector<std::uint8_t> mask_;
};

double masked_mean(const Field& f);
// Sample variance over observed cells with denominator n - 1.
double masked_variance(const Field& f);

// Odd window side q; Q = (q - 1) / 2 is the half-width.
class Window {
public:
    explicit Window(int q);
    int q() const noexcept { return q_; }
    int half() const noexcept { return (q_ - 1) / 2; }

private:
    int q_;
};

// A q-by-q block of a field centred on (center_row, center_col).
class WindowView {
public:
    WindowView(const Field& f, std::size_t top, std::size_t left, int q)
        : f_(&f), top_(top), left_(left), q_(q) {}

    std::size_t center_row() const noexcept { return top_ + (q_ - 1) / 2; }
    std::size_t center_col() const noexcept { return left_ + (q_ - 1) / 2; }
    int size() const noexcept { return q_; }
    bool observed(int r, int c) const { return f_->observed(top_ + r, left_ + c); }
    double operator()(int r, int c) const { return (*f_)(top_ + r, left_ + c); }

private:
    const Field* f_;
    std::size_t top_;
    std::size_t left_;
    int q_;
};

// Every fully contained window in row-major order of its centre.
class WindowRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = WindowView;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = WindowView;

        iterator() = default;
        iterator(const Field* f, int q, std::size_t top, std::size_t left)
            : f_(f), q_(q), top_(top), left_(left) {}
        WindowView operator*() const { return WindowView(*f_, top_, left_, q_); }
        iterator& operator++();
        iterator operator++(int) { auto t = *this; ++*this; return t; }
        bool operator==(const iterator& o) const { return top_ == o.top_ && left_ == o.left_; }

    private:
        const Field* f_ = nullptr;
        int q_ = 0;
        std::size_t top_ = 0;
        std::size_t left_ = 0;
    };

    WindowRange(const Field& f, Window w);
    iterator begin() const;
    iterator end() const;
    std::size_t out_rows() const noexcept { return out_rows_; }
    std::size_t out_cols() const noexcept { return out_cols_; }

private:
    const Field* f_;
    int q_;
    std::size_t out_rows_;
    std::size_t out_cols_;
};

// Throws ParameterError when the window does not fit in the field.
WindowRange window_iter(const Field& f, Window w);

}  // namespace vmma
