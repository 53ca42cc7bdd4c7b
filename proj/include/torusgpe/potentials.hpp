#pragma once
// Trap profiles U_omega(s) on [-sqrt(omega), inf) and grid verification of
// the quadratic-comparison hypotheses.

#include <stdexcept>
#include <vector>

namespace torusgpe {

enum class PotentialVariant { Quadratic, GaussianRing, Tabulated };

// Thrown when a potential is evaluated left of -sqrt(omega) or outside a
// tabulated range (extrapolation is forbidden).
class OutOfDomain : public std::domain_error {
public:
    explicit OutOfDomain(const std::string& what) : std::domain_error(what) {}
};

struct PotentialSpec {
    PotentialVariant variant = PotentialVariant::Quadratic;
    double omega = 1.0;
    double m_param = 1.0;           // GaussianRing shape parameter
    std::vector<double> s_samples;  // Tabulated: strictly increasing nodes
    std::vector<double> u_samples;  // Tabulated: nonnegative values

    static PotentialSpec quadratic(double omega);
    static PotentialSpec gaussianRing(double omega, double m_param);
    static PotentialSpec tabulated(double omega, std::vector<double> s, std::vector<double> u);
};

double evalU(const PotentialSpec& spec, double s);

struct HypothesisReport {
    double C1;      // max of sqrt(omega) |U - s^2| / s^2 over the grid
    double c_low;   // min of U/s^2
    double c_high;  // max of U/s^2
    bool pass;      // all finite and c_low > 0
    bool warning;   // relative deviation from s^2 reaches O(1) on the window
    int grid_points;
    double s_lo;
    double s_hi;
};

// Grid check of |U-s^2| <~ s^2/sqrt(omega) and U ~ s^2 on [-sqrt w, sqrt w],
// excluding s=0. tol_grid >= 64.
HypothesisReport checkHypotheses(const PotentialSpec& spec, int tol_grid);

} // namespace torusgpe
