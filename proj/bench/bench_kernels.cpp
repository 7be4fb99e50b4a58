// Benchmark: the OpenMP-parallel kernels against their serial reference
// implementations. Each pair must produce identical results; the timings
// show the speedup (equal on a single-core host).

#include "freetwist/lab.hpp"

#include <chrono>
#include <cstdio>
#include <string>

using namespace freetwist;
using farey::Slope;

namespace {

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void row(char const* kernel, double serial_s, double parallel_s, bool agree) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n",
                kernel, serial_s, parallel_s, serial_s / parallel_s,
                agree ? "results agree" : "RESULTS DIFFER");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled\n");
#else
    std::printf("OpenMP not available; both columns run the serial path\n");
#endif

    int exit_code = 0;

    {
        auto ball = farey::build_farey_ball(Int(6));
        double t0 = now_s();
        int ds = metric::estimate_delta_serial(ball);
        double t1 = now_s();
        int dp = metric::estimate_delta(ball);
        double t2 = now_s();
        row("thinness over slope ball 6", t1 - t0, t2 - t1, ds == dp);
        if (ds != dp) exit_code = 1;
    }

    auto wit = farey::distance_witnesses(Slope(0, 1), 6);
    auto rg6 = lab::make_realized_group(Slope(0, 1), wit[6]);
    lab::ScanOpts serial, parallel;
    serial.parallel = false;
    serial.max_syllables = parallel.max_syllables = 5;
    serial.max_exp = parallel.max_exp = 4;

    {
        double t0 = now_s();
        auto rs = lab::injectivity_scan(rg6, serial);
        double t1 = now_s();
        auto rp = lab::injectivity_scan(rg6, parallel);
        double t2 = now_s();
        bool agree = rs.full_text() == rp.full_text();
        row("injectivity scan (5,4)", t1 - t0, t2 - t1, agree);
        if (!agree) exit_code = 1;
    }

    {
        double t0 = now_s();
        auto rs = lab::pseudo_anosov_scan(rg6, serial);
        double t1 = now_s();
        auto rp = lab::pseudo_anosov_scan(rg6, parallel);
        double t2 = now_s();
        bool agree = rs.full_text() == rp.full_text();
        row("stretching scan (5,4)", t1 - t0, t2 - t1, agree);
        if (!agree) exit_code = 1;
    }

    return exit_code;
}
