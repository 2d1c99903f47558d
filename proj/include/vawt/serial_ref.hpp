#pragma once

#include "vawt/mesh.hpp"
#include "vawt/oracle.hpp"

// Plain-loop reference implementations of the OpenMP kernels. Kept separate so
// tests can assert the parallel paths are bit-identical and the benchmark can
// compare them.
namespace vawt::serial {

VoxelGrid build_grid(const Genotype& g);

FitnessResult sim_single(const VoxelGrid& grid, int spin, const WindSetup& wind);
FitnessResult sim_pair(const VoxelGrid& grid_a, int spin_a, const VoxelGrid& grid_b, int spin_b,
                       const WindSetup& wind);

TriMesh smooth(const TriMesh& mesh, int steps);

}  // namespace vawt::serial
