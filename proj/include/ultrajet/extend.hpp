#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ultrajet/conditions.hpp"
#include "ultrajet/fncore.hpp"
#include "ultrajet/geometry.hpp"
#include "ultrajet/jets.hpp"
#include "ultrajet/pou.hpp"
#include "ultrajet/seqcore.hpp"

namespace ultrajet {

struct DegreeSchedule {
  std::shared_ptr<const CubeDecomposition> dec;
  std::shared_ptr<const WeightSequence> seq;  ///< sequence whose m-view feeds Gbar
  double L = 1.0;
  unsigned degree_cap = 0;
  bool matrix_mode = false;
  std::vector<unsigned> p;         ///< degrees used
  std::vector<unsigned> uncapped;  ///< 2 Gbar(L d(x_i)) before the cap (saturates at 2 K_max)
  std::vector<bool> capped;

  std::size_t capped_count() const;
  /// Degree for an arbitrary distance, capped the same way.
  unsigned degree_at(double d, bool* was_capped = nullptr) const;
};

/// Single-sequence mode; seq needs moderate growth.
DegreeSchedule schedule(std::shared_ptr<const CubeDecomposition> dec, const WeightSequence& seq, double L,
                        unsigned degree_cap);
/// Matrix mode: Gbar of the last row of a resolved chain.
DegreeSchedule schedule(std::shared_ptr<const CubeDecomposition> dec, const WeightMatrix& matrix,
                        const ChainCertificate& chain, double L, unsigned degree_cap);

class ExtensionField {
 public:
  ExtensionField(Ultrajet jet, PartitionOfUnity pou, DegreeSchedule sched);

  struct Value {
    TruncatedJet jet;  ///< coefficients d^alpha f(x) / alpha!
    bool on_set = false;
    bool collar = false;
    bool outside = false;
    bool capped = false;  ///< a contributing cube had its degree capped
  };
  unsigned max_order() const;
  Value eval(const Point& x, unsigned order) const;
  double derivative(const Point& x, const MultiIndex& alpha) const;

  const Ultrajet& jet() const { return jet_; }
  const PartitionOfUnity& pou() const { return pou_; }
  const DegreeSchedule& schedule() const { return sched_; }
  const CubeDecomposition& decomposition() const { return pou_.decomposition(); }

 private:
  Ultrajet jet_;
  PartitionOfUnity pou_;
  DegreeSchedule sched_;
};

/// Throws IncompatibleGeometry when the schedule and partition use different decompositions.
ExtensionField extend(Ultrajet jet, PartitionOfUnity pou, DegreeSchedule sched);

struct ResidualRow {
  std::size_t a = 0;  ///< index into E
  MultiIndex alpha;
  std::vector<double> d;
  std::vector<double> residual;
  std::vector<bool> capped;
  bool monotone = false;  ///< decreasing with d overall, one inversion below 10% allowed
  double fit_C = 0.0, fit_K = 0.0;
  bool fit_ok = false;
};

struct GrowthCertificate {
  unsigned max_order = 0;
  std::size_t grid_points = 0;
  std::size_t collar_points = 0;  ///< skipped: the partition does not cover them
  std::vector<double> sup;  ///< per |alpha|, max over multi-indices of that order
  double M1 = 0.0, C = 0.0;
};

struct SpotCheck {
  double C_taylor_bound = 0.0;    ///< realized constant in |d^a T(x)| <= C (2L)^{|a|+1} S_|a|
  double C_taylor_residual = 0.0; ///< same for |d^a T(x) - F^a(xhat)| <= C (2L)^{|a|+1} |a|! s_{|a|+1} d(x)
  std::size_t samples = 0;
};

struct FdCheck {
  std::size_t points = 0;
  double max_rel_error = 0.0;
  Point worst_point{0, 0};
  MultiIndex worst_alpha;
  std::vector<unsigned> skipped_orders;  ///< orders whose grid sup is at rounding level
};

struct VerifyOptions {
  std::vector<unsigned> orders{0, 1, 2, 3, 4};
  std::vector<double> approach_scales;  ///< default 2^-3 .. 2^-10
  std::size_t growth_grid = 4001;       ///< per axis
  unsigned growth_order = 8;
  std::size_t fd_points = 100;
  unsigned fd_order = 4;
  double fit_cap = 1e12;
  std::uint64_t seed = 1;
  unsigned workers = 1;  ///< growth grid only; results do not depend on it
};

struct VerifyReport {
  std::vector<ResidualRow> residuals;
  GrowthCertificate growth;
  SpotCheck spot;
  FdCheck fd;
  std::vector<std::string> warnings;
  bool residuals_ok() const;
};

/// `target` carries W in the growth certificate; `source` is the jet's certification sequence S.
VerifyReport verify(const ExtensionField& field, const WeightSequence& target, const WeightSequence& source,
                    const VerifyOptions& opt = {});

/// Growth certificate only, on an evenly spaced grid of the box with `per_axis` points.
GrowthCertificate growth_certificate(const ExtensionField& field, const WeightSequence& target, unsigned max_order,
                                     std::size_t per_axis, unsigned workers = 1);

struct GuardedExtension {
  std::optional<ExtensionField> field;
  VerifyReport report;
  double L = 0.0;
  unsigned doublings = 0;
  bool ok = false;
};

/// L = guard * rho, doubled until the residual checks pass or L exceeds 2^16 rho.
/// The growth certificate is taken against the schedule's sequence.
GuardedExtension extend_guarded(const Ultrajet& jet, const PartitionOfUnity& pou,
                                const std::function<DegreeSchedule(double L)>& make_schedule,
                                const WeightSequence& source, double rho, double guard,
                                const VerifyOptions& opt = {});
/// Single-sequence mode; degree_cap 0 means the jet's order cap.
GuardedExtension extend_guarded(const Ultrajet& jet, const PartitionOfUnity& pou, const WeightSequence& seq,
                                const WeightSequence& source, double rho, double guard,
                                const VerifyOptions& opt = {}, unsigned degree_cap = 0);

}  // namespace ultrajet
