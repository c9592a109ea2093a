#include "vmma/convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include "vmma/error.hpp"

namespace vmma {

namespace {

// FFTW's planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

struct PlanDeleter {
    void operator()(fftw_plan p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

void check_shapes(const KernelMatrix& k, const Matrix& signal) {
    const auto p2 = static_cast<std::size_t>(2 * k.half_width());
    if (signal.rows() <= p2 || signal.cols() <= p2)
        throw ParameterError("signal " + std::to_string(signal.rows()) + "x" +
                             std::to_string(signal.cols()) + " too small for kernel half-width " +
                             std::to_string(k.half_width()));
}

}  // namespace

Matrix convolve_fft(const KernelMatrix& k, const Matrix& signal) {
    check_shapes(k, signal);
    const std::size_t p = static_cast<std::size_t>(k.half_width());
    const std::size_t ks = 2 * p + 1;
    const std::size_t n_rows = signal.rows() - 2 * p;
    const std::size_t n_cols = signal.cols() - 2 * p;
    const std::size_t pr = n_rows + 4 * p;
    const std::size_t pc = n_cols + 4 * p;
    const std::size_t hc = pc / 2 + 1;

    FftwBuffer<double> a(static_cast<double*>(fftw_malloc(sizeof(double) * pr * pc)));
    FftwBuffer<double> b(static_cast<double*>(fftw_malloc(sizeof(double) * pr * pc)));
    FftwBuffer<fftw_complex> fa(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * pr * hc)));
    FftwBuffer<fftw_complex> fb(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * pr * hc)));
    if (!a || !b || !fa || !fb) throw std::bad_alloc();

    Plan fwd_a, fwd_b, inv;
    {
        std::lock_guard lock(planner_mutex());
        const int r = static_cast<int>(pr), c = static_cast<int>(pc);
        fwd_a.reset(fftw_plan_dft_r2c_2d(r, c, a.get(), fa.get(), FFTW_ESTIMATE));
        fwd_b.reset(fftw_plan_dft_r2c_2d(r, c, b.get(), fb.get(), FFTW_ESTIMATE));
        inv.reset(fftw_plan_dft_c2r_2d(r, c, fa.get(), a.get(), FFTW_ESTIMATE));
    }

    std::fill(a.get(), a.get() + pr * pc, 0.0);
    std::fill(b.get(), b.get() + pr * pc, 0.0);
    for (std::size_t r = 0; r < ks; ++r)
        for (std::size_t c = 0; c < ks; ++c) a[r * pc + c] = k(r, c);
    for (std::size_t r = 0; r < signal.rows(); ++r)
        for (std::size_t c = 0; c < signal.cols(); ++c) b[r * pc + c] = signal(r, c);

    fftw_execute(fwd_a.get());
    fftw_execute(fwd_b.get());
    for (std::size_t t = 0; t < pr * hc; ++t) {
        const double re = fa[t][0] * fb[t][0] - fa[t][1] * fb[t][1];
        const double im = fa[t][0] * fb[t][1] + fa[t][1] * fb[t][0];
        fa[t][0] = re;
        fa[t][1] = im;
    }
    // The complex-to-real inverse enforces Hermitian symmetry, so the discarded
    // imaginary part of the full inverse transform is zero by construction.
    fftw_execute(inv.get());

    const double scale = 1.0 / static_cast<double>(pr * pc);
    Matrix out(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_cols; ++j) out(i, j) = a[(i + 2 * p) * pc + (j + 2 * p)] * scale;
    return out;
}

Matrix convolve_direct(const KernelMatrix& k, const Matrix& signal) {
    check_shapes(k, signal);
    const std::size_t p = static_cast<std::size_t>(k.half_width());
    const std::size_t ks = 2 * p + 1;
    const std::size_t n_rows = signal.rows() - 2 * p;
    const std::size_t n_cols = signal.cols() - 2 * p;
    Matrix out(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_cols; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < ks; ++a)
                for (std::size_t b = 0; b < ks; ++b) s += k(a, b) * signal(i + 2 * p - a, j + 2 * p - b);
            out(i, j) = s;
        }
    return out;
}

}  // namespace vmma
