#pragma once

#include <iosfwd>
#include <vector>

#include "sfs/solver.hpp"

namespace sfs::detail {

/// Throws Error(ConfigError) when grids or channel counts disagree.
void check_inputs(const ModelInputs& in, const ScalarField& z0, const Weights& w);

double mean(const std::vector<double>& v);
void anchor_mean(std::vector<double>& v, double target);
double norm(const VectorField& a);

void write_log_line(std::ostream& os, const IterationRecord& r);
bool relative_change_below(double previous, double current, double tol);
SolveResult finish(SolverState state, const ModelInputs& in, StopReason reason);

}  // namespace sfs::detail
