#include "fft.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace tubal::fft {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment, so
// results are bitwise reproducible across allocations.
constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace

void forward_tubes(const double* in, std::complex<double>* out, const Dims& dims) {
    const int n = static_cast<int>(dims.n3);
    const int howmany = static_cast<int>(dims.slice_size());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_many_dft_r2c(1, &n, howmany, const_cast<double*>(in), nullptr,
                                          howmany, 1, as_fftw(out), nullptr, howmany, 1,
                                          kFlags | FFTW_PRESERVE_INPUT));
    }
    fftw_execute_dft_r2c(plan.get(), const_cast<double*>(in), as_fftw(out));
}

void inverse_tubes_real(const std::complex<double>* in, double* out, const Dims& dims) {
    const int n = static_cast<int>(dims.n3);
    const int howmany = static_cast<int>(dims.slice_size());
    const std::size_t half = dims.n3 / 2 + 1;
    // c2r destroys its input.
    std::vector<std::complex<double>> scratch(in, in + half * dims.slice_size());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_many_dft_c2r(1, &n, howmany, as_fftw(scratch.data()), nullptr,
                                          howmany, 1, out, nullptr, howmany, 1, kFlags));
    }
    fftw_execute_dft_c2r(plan.get(), as_fftw(scratch.data()), out);
    const double scale = 1.0 / static_cast<double>(dims.n3);
    std::for_each(out, out + dims.total(), [scale](double& v) { v *= scale; });
}

void inverse_tubes_complex(const std::complex<double>* in, std::complex<double>* out,
                           const Dims& dims) {
    const int n = static_cast<int>(dims.n3);
    const int howmany = static_cast<int>(dims.slice_size());
    std::vector<std::complex<double>> scratch(in, in + dims.total());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_many_dft(1, &n, howmany, as_fftw(scratch.data()), nullptr, howmany,
                                      1, as_fftw(out), nullptr, howmany, 1, FFTW_BACKWARD,
                                      kFlags));
    }
    fftw_execute_dft(plan.get(), as_fftw(scratch.data()), as_fftw(out));
    const double scale = 1.0 / static_cast<double>(dims.n3);
    std::for_each(out, out + dims.total(), [scale](std::complex<double>& v) { v *= scale; });
}

} // namespace tubal::fft
