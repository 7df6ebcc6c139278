#include "nyv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "nyv/errors.hpp"

namespace nyv::fft {
namespace {

struct PlanCache {
    std::mutex mu;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans;

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = plans.find({n, sign});
        if (it != plans.end()) return it->second;
        // Plan on scratch buffers; FFTW_UNALIGNED lets us execute on any
        // caller buffer with fftw_execute_dft.
        std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n),
                                       reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                       reinterpret_cast<fftw_complex*>(scratch_out.data()),
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw numeric_error("fftw plan creation failed");
        plans.emplace(std::make_pair(n, sign), p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out, int sign) {
    const std::size_t n = in.size();
    out.resize(n);
    fftw_plan p = cache().get(n, sign);
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
    run(in, out, FFTW_FORWARD);
}

void inverse(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
    run(in, out, FFTW_BACKWARD);
}

}  // namespace nyv::fft
