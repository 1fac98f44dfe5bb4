#pragma once

#include "reingame/model.hpp"

#include <string>
#include <vector>

namespace reingame {

// (r, d) coordinates that index the reinsurer's equilibrium regimes:
// r = theta_I / theta_R, d = (b_I + rho_I) - (b_R + rho_R).
struct PreferenceCoordinates {
    double r = 0.0;
    double d = 0.0;
};

enum class Region { I, II, III, IV, V, VI, VII, VIII };
enum class RegionKind { Area, Line, Point };

struct RegionLabel {
    Region region = Region::I;
    RegionKind kind = RegionKind::Area;
};

std::string to_string(Region region);
std::string to_string(RegionKind kind);

// Thrown when a coordinate sits within relative tolerance 1e-12 of a region
// boundary without lying on it exactly; classification would hinge on
// floating-point rounding.
class BoundaryTie : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

PreferenceCoordinates coordinates(const GameParameters& params);

// Membership predicate of one region, with boundary orientations taken
// literally; region II excludes the pocket that region VIII carves out of it
// so the eight sets partition {(d, r) : r > 0}.
bool region_matches(Region region, const PreferenceCoordinates& coords, double reinsurer_reversion,
                    double terminal_time);

RegionLabel classify(const PreferenceCoordinates& coords, double reinsurer_reversion,
                     double terminal_time);

// Start of the selling window in regions IV and VIII:
// T + ln(b_R r / (b_R + d)) / d. Also the stationary point of the intent.
double startup_time(const PreferenceCoordinates& coords, double reinsurer_reversion,
                    double terminal_time);
// End of the selling window in regions II and VIII: T + ln(r) / d.
double cutoff_time(const PreferenceCoordinates& coords, double terminal_time);

struct EquilibriumLaws {
    std::vector<ReinsuranceLaw> laws;
    // Set for the single point regime where every division is an equilibrium;
    // laws then holds the canonical terminal-purchase default.
    bool any_division = false;
};

EquilibriumLaws equilibrium_law(const RegionLabel& label, const PreferenceCoordinates& coords,
                                double reinsurer_reversion, double terminal_time);

// Premium equal to the threshold on the purchasing region and threshold *
// (1 + markup) on the waiting region, sampled on a uniform grid augmented
// with the law's interval endpoints. markup must be positive.
PremiumPath generate_premium(const ReinsuranceLaw& law, const InsurerParams& insurer,
                             const Horizon& horizon, double markup, int n_grid = 2001);

// Division of [0, T] into {t : c(t) <= threshold(t)} and its complement,
// computed cell by cell with bisection refinement of threshold crossings.
ReinsuranceLaw insurer_law(const PremiumPath& premium, const InsurerParams& insurer,
                           const Horizon& horizon);

struct CurveSample {
    std::string curve;
    double d = 0.0;
    double r = 0.0;
};

// Samples of the boundary curves r = 1, r = exp(-T d), r = 1 + d/b_R,
// r = (1 + d/b_R) exp(-T d) plus the d = 0 axis, restricted to r >= 0.
std::vector<CurveSample> boundary_curves(double reinsurer_reversion, double terminal_time,
                                         double d_min, double d_max, int n);

}  // namespace reingame
