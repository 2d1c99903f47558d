// Timing comparison of the OpenMP kernels against their serial references.
// Usage: vawt-bench [iterations] [seed]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "vawt/mesh.hpp"
#include "vawt/oracle.hpp"
#include "vawt/rng.hpp"
#include "vawt/serial_ref.hpp"

#ifdef VAWT_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double time_ms(int iterations, const Fn& fn) {
    auto start = Clock::now();
    for (int i = 0; i < iterations; ++i) fn(i);
    auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / iterations;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
    int iterations = argc > 1 ? std::atoi(argv[1]) : 20;
    std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;

#ifdef VAWT_HAVE_OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled at configure time; both columns run serial code\n");
#endif

    vawt::Rng rng(seed);
    std::vector<vawt::Genotype> genomes;
    for (int i = 0; i < iterations; ++i)
        genomes.push_back(vawt::random_genotype(rng, vawt::GenomeMode::array));

    report("grid build",
           time_ms(iterations, [&](int i) { (void)vawt::serial::build_grid(genomes[i]); }),
           time_ms(iterations, [&](int i) { (void)vawt::build_grid(genomes[i]); }));

    std::vector<vawt::VoxelGrid> grids;
    for (int i = 0; i < iterations; ++i) grids.push_back(vawt::build_grid(genomes[i]));
    vawt::WindSetup wind;

    report("torque scan (single)",
           time_ms(iterations, [&](int i) { (void)vawt::serial::sim_single(grids[i], 1, wind); }),
           time_ms(iterations, [&](int i) { (void)vawt::sim_single(grids[i], 1, wind); }));

    report("torque scan (pair)",
           time_ms(iterations,
                   [&](int i) {
                       (void)vawt::serial::sim_pair(grids[i], 1,
                                                    grids[(i + 1) % iterations], 1, wind);
                   }),
           time_ms(iterations, [&](int i) {
               (void)vawt::sim_pair(grids[i], 1, grids[(i + 1) % iterations], 1, wind);
           }));

    vawt::TriMesh mesh = vawt::extract_surface(grids[0]);
    std::printf("smoothing mesh: %zu vertices, %zu triangles\n", mesh.vertices.size(),
                mesh.tris.size());
    int smooth_iters = std::max(1, iterations / 4);
    report("laplacian smooth (50 steps)",
           time_ms(smooth_iters, [&](int) { (void)vawt::serial::smooth(mesh, 50); }),
           time_ms(smooth_iters, [&](int) { (void)vawt::smooth(mesh, 50); }));
    return 0;
}
