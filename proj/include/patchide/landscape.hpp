#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace patchide {

using Vector = Eigen::VectorXd;

/// The domain (-a, a) cut at interior interface points a_1 < ... < a_n into
/// patches Omega_0 = (-a, a_1), ..., Omega_n = (a_n, a).
class PatchPartition {
 public:
  /// Throws InvalidModel unless a > 0 and -a < a_1 < ... < a_n < a.
  PatchPartition(double half_length, std::vector<double> interfaces = {});

  double half_length() const { return half_length_; }
  const std::vector<double>& interfaces() const { return interfaces_; }
  std::size_t patch_count() const { return interfaces_.size() + 1; }
  double measure() const { return 2 * half_length_; }

  double patch_lower(std::size_t patch) const;
  double patch_upper(std::size_t patch) const;
  double patch_length(std::size_t patch) const { return patch_upper(patch) - patch_lower(patch); }

  /// Patch containing x. Throws PointOutsideDomain if |x| >= a and
  /// PointOnInterface if x equals an interface point exactly.
  std::size_t patch_of(double x) const;

  bool operator==(const PatchPartition&) const = default;

 private:
  double half_length_;
  std::vector<double> interfaces_;
};

/// One smooth formula on a block Omega_i x Omega_j.
struct KernelPiece {
  enum class Form { Constant, Exponential };

  Form form = Form::Constant;
  double coefficient = 1;  // c
  double decay = 0;        // b, exponential only

  static KernelPiece constant(double c) { return {Form::Constant, c, 0}; }
  static KernelPiece exponential(double c, double b) { return {Form::Exponential, c, b}; }

  double operator()(double x, double y) const;

  bool operator==(const KernelPiece&) const = default;
};

/// Piecewise dispersal kernel with declared bounds delta < k <= Lambda.
/// The bounds are hypotheses of the scenario author; validate_assumptions
/// checks them by sampling.
class KernelSpec {
 public:
  /// `pieces` is row-major over patch pairs: pieces[i * P + j] is the formula
  /// for x in Omega_i, y in Omega_j. Throws InvalidModel on a wrong piece
  /// count, non-positive coefficient, negative decay, or delta >= Lambda.
  KernelSpec(PatchPartition partition, std::vector<KernelPiece> pieces, double delta,
             double lambda_bound);

  /// Every block set to the same piece.
  static KernelSpec uniform(PatchPartition partition, KernelPiece piece, double delta,
                            double lambda_bound);

  const PatchPartition& partition() const { return partition_; }
  const KernelPiece& piece(std::size_t row_patch, std::size_t col_patch) const {
    return pieces_[row_patch * partition_.patch_count() + col_patch];
  }
  const std::vector<KernelPiece>& pieces() const { return pieces_; }
  double delta() const { return delta_; }
  double lambda_bound() const { return lambda_bound_; }

  bool operator==(const KernelSpec&) const = default;

 private:
  PatchPartition partition_;
  std::vector<KernelPiece> pieces_;
  double delta_;
  double lambda_bound_;
};

double eval_kernel(const KernelSpec& spec, double x, double y);

/// Beverton-Holt growth r0 u / (1 + u / b), optionally with a constant influx
/// c added on u >= 0. Vanishes for u < 0.
class GrowthFunction {
 public:
  enum class Variant { BevertonHolt, BevertonHoltWithInflux };

  static GrowthFunction beverton_holt(double r0, double b);
  static GrowthFunction beverton_holt_with_influx(double c, double r0, double b);

  Variant variant() const { return variant_; }
  double r0() const { return r0_; }
  double capacity() const { return b_; }
  double influx() const { return c_; }

  /// Least upper bound of F.
  double bound() const { return c_ + r0_ * b_; }
  /// F(0).
  double at_zero() const { return c_; }

  double operator()(double u) const { return u < 0 ? 0.0 : c_ + r0_ * u / (1 + u / b_); }

  bool operator==(const GrowthFunction&) const = default;

 private:
  GrowthFunction(Variant v, double c, double r0, double b);

  Variant variant_;
  double c_;
  double r0_;
  double b_;
};

inline double growth_eval(const GrowthFunction& g, double u) { return g(u); }

/// A density that is constant between consecutive breakpoints, so continuous
/// except at finitely many points.
struct PiecewiseProfile {
  std::vector<double> breakpoints;  // ascending, inside (-a, a)
  std::vector<double> values;       // breakpoints.size() + 1 entries

  double operator()(double x) const;

  template <typename Nodes>
  Vector sample(const Nodes& nodes) const {
    Vector out(nodes.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = (*this)(nodes(i));
    return out;
  }
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  /// Advisory checks are reported but do not fail the report.
  bool advisory = false;
  std::string witness;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/// Samples the model hypotheses: kernel bounds on a sample_count x
/// sample_count lattice inside every patch block, F bounded and strictly
/// increasing, F(u)/u strictly decreasing on a geometric ladder in (0, 10 M],
/// and r0 > 1 (advisory). Throws InvalidSampleCount if sample_count < 2.
AssumptionReport validate_assumptions(const KernelSpec& spec, const GrowthFunction& g,
                                      int sample_count);

}  // namespace patchide
