#include "patchide/threshold.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace patchide {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::R0: return "r0";
    case SweepParameter::HalfLength: return "half_length";
    case SweepParameter::Coefficient: return "coefficient";
    case SweepParameter::Decay: return "decay";
  }
  return "?";
}

CriticalR0 critical_r0(const DiscreteOperator& op, double tol, const EigenOptions& options) {
  CriticalR0 out;
  out.rho = principal_eigen(op, 1.0, options).lambda0;
  out.r0_star = 1 / out.rho;
  out.check_lambda0 = principal_eigen(op, out.r0_star, options).lambda0;
  if (!(std::abs(out.check_lambda0 - 1) <= tol)) {
    throw InvariantViolation(fmt::format("lambda0 at r0* = {} is {}, not within {} of 1",
                                         out.r0_star, out.check_lambda0, tol));
  }
  return out;
}

Scenario with_parameter(const Scenario& base, const SweepSpec& sweep, double value) {
  Scenario s = base;
  switch (sweep.parameter) {
    case SweepParameter::R0: {
      const auto& g = base.growth;
      s.growth = g.variant() == GrowthFunction::Variant::BevertonHolt
                     ? GrowthFunction::beverton_holt(value, g.capacity())
                     : GrowthFunction::beverton_holt_with_influx(g.influx(), value, g.capacity());
      break;
    }
    case SweepParameter::HalfLength: {
      const auto& part = base.kernel.partition();
      const double scale = value / part.half_length();
      std::vector<double> interfaces = part.interfaces();
      for (double& p : interfaces) p *= scale;
      s.kernel = KernelSpec(PatchPartition(value, std::move(interfaces)), base.kernel.pieces(),
                            base.kernel.delta(), base.kernel.lambda_bound());
      break;
    }
    case SweepParameter::Coefficient:
    case SweepParameter::Decay: {
      const std::size_t patches = base.kernel.partition().patch_count();
      auto pieces = base.kernel.pieces();
      for (const auto& [i, j] : sweep.pieces) {
        if (i >= patches || j >= patches) {
          throw ValidationError(fmt::format("sweep references missing patch pair ({}, {})", i, j));
        }
        auto& piece = pieces[i * patches + j];
        if (sweep.parameter == SweepParameter::Coefficient) {
          piece.coefficient = value;
        } else {
          if (piece.form != KernelPiece::Form::Exponential) {
            throw ValidationError(
                fmt::format("decay sweep on non-exponential kernel piece ({}, {})", i, j));
          }
          piece.decay = value;
        }
      }
      s.kernel = KernelSpec(base.kernel.partition(), std::move(pieces), base.kernel.delta(),
                            base.kernel.lambda_bound());
      break;
    }
  }
  return s;
}

namespace {

double principal_rho(const Scenario& s) {
  const auto grid = build_grid(s.kernel.partition(), s.panels_per_patch, s.gauss_order);
  const auto op = assemble_operator(s.kernel, grid);
  return principal_eigen(op, 1.0, s.eigen).lambda0;
}

double lambda_at(const Scenario& s) { return s.growth.r0() * principal_rho(s); }

void validate_endpoint(const Scenario& base, const SweepSpec& spec, double value) {
  const Scenario s = [&] {
    try {
      return with_parameter(base, spec, value);
    } catch (const InvalidModel& e) {
      throw ValidationError(fmt::format("sweep endpoint {} = {}: {}", to_string(spec.parameter),
                                        value, e.what()));
    }
  }();
  const auto report = validate_assumptions(s.kernel, s.growth, spec.validation_samples);
  for (const auto& c : report.checks) {
    if (!c.passed && !c.advisory) {
      throw ValidationError(fmt::format("sweep endpoint {} = {} fails {}: {}",
                                        to_string(spec.parameter), value, c.name, c.witness));
    }
  }
}

}  // namespace

PhaseTable sweep(const Scenario& base, const SweepSpec& spec) {
  if (!(spec.lo < spec.hi) || spec.samples < 2) {
    throw ValidationError("sweep needs lo < hi and at least two samples");
  }
  if ((spec.parameter == SweepParameter::Coefficient || spec.parameter == SweepParameter::Decay) &&
      spec.pieces.empty()) {
    throw ValidationError("coefficient and decay sweeps need at least one kernel piece");
  }
  validate_endpoint(base, spec, spec.lo);
  validate_endpoint(base, spec, spec.hi);

  PhaseTable table;
  table.parameter = spec.parameter;
  const bool is_r0 = spec.parameter == SweepParameter::R0;
  // Grid and operator are unchanged along an r0 sweep.
  const double base_rho = is_r0 ? principal_rho(base) : 0.0;

  auto eval = [&](double value) {
    const Scenario s = with_parameter(base, spec, value);
    const double lambda0 = is_r0 ? value * base_rho : lambda_at(s);
    return PhaseRow{value, lambda0, classify_regime(lambda0, s.growth)};
  };

  for (int k = 0; k < spec.samples; ++k) {
    const double value =
        k + 1 == spec.samples ? spec.hi : spec.lo + (spec.hi - spec.lo) * k / (spec.samples - 1);
    table.rows.push_back(eval(value));
  }

  // Direction of monotonicity implied by entrywise monotone positive matrices.
  double direction = 1;
  bool check_monotone = true;
  if (spec.parameter == SweepParameter::Decay) direction = -1;
  if (spec.parameter == SweepParameter::HalfLength) {
    const auto& pieces = base.kernel.pieces();
    const bool all_constant = std::all_of(pieces.begin(), pieces.end(), [](const KernelPiece& p) {
      return p.form == KernelPiece::Form::Constant;
    });
    check_monotone = all_constant || base.kernel.partition().interfaces().empty();
  }
  if (check_monotone) {
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      const double step = direction * (table.rows[k].lambda0 - table.rows[k - 1].lambda0);
      if (step < -1e-10) {
        throw InvariantViolation(fmt::format(
            "lambda0 not monotone in {}: {} at {} then {} at {}", to_string(spec.parameter),
            table.rows[k - 1].lambda0, table.rows[k - 1].value, table.rows[k].lambda0,
            table.rows[k].value));
      }
    }
  }

  const double width_target = (spec.hi - spec.lo) * 1e-6;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const bool above_lo = table.rows[k - 1].lambda0 > 1;
    const bool above_hi = table.rows[k].lambda0 > 1;
    if (above_lo == above_hi) continue;
    Crossing c{table.rows[k - 1].value, table.rows[k].value, 0};
    if (is_r0) {
      c.value = 1 / base_rho;
    } else {
      double lo = c.lower;
      double hi = c.upper;
      while (hi - lo >= width_target) {
        const double mid = 0.5 * (lo + hi);
        if ((lambda_at(with_parameter(base, spec, mid)) > 1) == above_lo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      c.value = 0.5 * (lo + hi);
    }
    table.crossings.push_back(c);
  }
  if (table.crossings.size() > 1) {
    std::string brackets;
    for (const auto& c : table.crossings) brackets += fmt::format(" [{}, {}]", c.lower, c.upper);
    throw NonMonotoneCrossing(fmt::format("lambda0 crosses 1 more than once:{}", brackets));
  }
  return table;
}

}  // namespace patchide
