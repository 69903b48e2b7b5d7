#include "podsurf/error.hpp"
#include "podsurf/study.hpp"

namespace podsurf {

double rom_drag_objective(const FomProblem& fom, const RomModel& rom, const ParameterPoint& mu) {
  if (fom.id() != FomId::FfdDrag) fail(ErrorCode::InvalidArgument, "shape optimization needs ffd-drag");
  if (rom.n_dof() != static_cast<std::size_t>(kHullPoints))
    fail(ErrorCode::DimensionMismatch, "ROM is not over the ffd-drag resistance field");
  const Eigen::VectorXd w = rom.weights ? *rom.weights : fom.weights("resistance");
  const auto r = infer(rom, mu).field;
  return w.dot(r) + area_penalty(fom.deformed_hull(mu));
}

ShapeOptResult optimize_shape(const FomProblem& fom, const RomModel& rom, const GaConfig& config) {
  if (!(rom.space == fom.space()))
    fail(ErrorCode::DimensionMismatch, "ROM parameter space differs from the FOM's");
  ShapeOptResult out;
  out.ga = ga_optimize([&](const ParameterPoint& mu) { return rom_drag_objective(fom, rom, mu); },
                       fom.space(), config);
  out.best = out.ga.best;
  out.rom_value = out.ga.best_value;
  out.fom_value = fom.drag_objective(out.best);
  return out;
}

}  // namespace podsurf
