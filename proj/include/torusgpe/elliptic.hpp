#pragma once
// Complete elliptic integrals K(k), E(k), the Jacobi functions sn, cn, dn,
// and inversion of the mass-modulus relation m = 8 E(k) K(k).

#include <stdexcept>

namespace torusgpe {

// Modulus k restricted to the open interval (0,1); endpoints are rejected
// because K degenerates there.
class EllipticModulus {
public:
    explicit EllipticModulus(double k);
    double value() const noexcept { return k_; }

private:
    double k_;
};

struct JacobiTriple {
    double sn;
    double cn;
    double dn;
};

// Thrown by invertMass when m <= 2*pi^2, where no dnoidal modulus exists.
class MassTooSmall : public std::domain_error {
public:
    explicit MassTooSmall(double m);
    double mass;
};

double completeK(EllipticModulus k);
double completeE(EllipticModulus k);

// Both integrals from one AGM chain; cheaper when K and E are both needed.
struct CompleteKE {
    double K;
    double E;
};
CompleteKE completeKE(EllipticModulus k);

JacobiTriple jacobi(double z, EllipticModulus k);

// m(k) = 8 E(k) K(k); strictly increasing, range (2*pi^2, inf) on (0,1).
double massOfModulus(EllipticModulus k);

// Unique k with massOfModulus(k) = m, to relative residual 1e-12.
EllipticModulus invertMass(double m);

} // namespace torusgpe
