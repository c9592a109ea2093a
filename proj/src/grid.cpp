#include "vmma/grid.hpp"

#include <cmath>
#include <string>

#include "vmma/error.hpp"

namespace vmma {

Grid::Grid(Point origin, double spacing, std::size_t rows, std::size_t cols)
    : origin_(origin), spacing_(spacing), rows_(rows), cols_(cols) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ParameterError("grid spacing must be positive and finite");
    if (rows == 0 || cols == 0) throw ParameterError("grid must have at least one row and column");
}

Point Grid::node(std::size_t i, std::size_t j) const {
    return {origin_.x1 + static_cast<double>(i) * spacing_,
            origin_.x2 + static_cast<double>(j) * spacing_};
}

Grid Grid::enlarged(std::size_t border) const {
    const double shift = static_cast<double>(border) * spacing_;
    return Grid({origin_.x1 - shift, origin_.x2 - shift}, spacing_, rows_ + 2 * border,
                cols_ + 2 * border);
}

Grid make_grid(Point origin, double spacing, long rows, long cols) {
    if (rows <= 0 || cols <= 0)
        throw ParameterError("grid size must be positive, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    return Grid(origin, spacing, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
}

Field::Field(Grid grid)
    : grid_(grid), values_(grid.rows(), grid.cols()), mask_(grid.size(), 1) {}

Field::Field(Grid grid, Matrix values)
    : grid_(grid), values_(std::move(values)), mask_(grid.size(), 1) {
    if (values_.rows() != grid_.rows() || values_.cols() != grid_.cols())
        throw ParameterError("field values do not match grid shape");
}

Field::Field(Grid grid, Matrix values, std::vector<std::uint8_t> mask)
    : grid_(grid), values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.rows() != grid_.rows() || values_.cols() != grid_.cols())
        throw ParameterError("field values do not match grid shape");
    if (mask_.size() != grid_.size()) throw ParameterError("field mask does not match grid shape");
}

void Field::set(std::size_t i, std::size_t j, double v) {
    values_(i, j) = v;
    mask_[i * cols() + j] = 1;
}

void Field::set_missing(std::size_t i, std::size_t j) {
    values_(i, j) = 0.0;
    mask_[i * cols() + j] = 0;
}

std::size_t Field::count_observed() const {
    std::size_t n = 0;
    for (auto m : mask_) n += m != 0;
    return n;
}

double masked_mean(const Field& f) {
    const auto v = f.values().data();
    const auto& m = f.mask();
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (m[k]) {
            s += v[k];
            ++n;
        }
    if (n == 0) throw DataError("mean of a field with no observed cells");
    return s / static_cast<double>(n);
}

double masked_variance(const Field& f) {
    const auto v = f.values().data();
    const auto& m = f.mask();
    std::size_t n = 0;
    for (auto x : m) n += x != 0;
    if (n < 2) throw DataError("variance needs at least two observed cells");
    const double mu = masked_mean(f);
    double ss = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (m[k]) ss += (v[k] - mu) * (v[k] - mu);
    return ss / static_cast<double>(n - 1);
}

Window::Window(int q) : q_(q) {
    if (q < 3 || q % 2 == 0)
        throw ParameterError("window side must be odd and at least 3, got " + std::to_string(q));
}

WindowRange::iterator& WindowRange::iterator::operator++() {
    const std::size_t last_left = f_->cols() - static_cast<std::size_t>(q_);
    if (left_ < last_left) {
        ++left_;
    } else {
        left_ = 0;
        ++top_;
    }
    return *this;
}

WindowRange::WindowRange(const Field& f, Window w) : f_(&f), q_(w.q()) {
    const auto q = static_cast<std::size_t>(q_);
    if (q > f.rows() || q > f.cols())
        throw ParameterError("window side " + std::to_string(q_) + " exceeds field size");
    out_rows_ = f.rows() - q + 1;
    out_cols_ = f.cols() - q + 1;
}

WindowRange::iterator WindowRange::begin() const { return iterator(f_, q_, 0, 0); }
WindowRange::iterator WindowRange::end() const { return iterator(f_, q_, out_rows_, 0); }

WindowRange window_iter(const Field& f, Window w) { return WindowRange(f, w); }

}  // namespace vmma
