#pragma once

// Tilted boxes c + M[B] where B is a product of balls p^{r_k} Z_p: the
// anisotropic caps U_{I,t}, the axis-aligned variant U'_I, the frequency
// plates tau_theta, and spatial tubes.  Membership is decided exactly by a
// frame solve.

#include "padiclab/curves.hpp"

#include <string>
#include <vector>

namespace padiclab {

class AffineBox {
public:
    // c + M [ prod_k p^{radius_exp[k]} Z_p ]
    AffineBox(PadicVector center, PadicMatrix frame, std::vector<long> radius_exp,
              std::string label = "")
        : c_(std::move(center)), m_(std::move(frame)), inv_(m_.inverse()),
          r_(std::move(radius_exp)), label_(std::move(label)) {}

    int dim() const { return m_.rows(); }
    const PadicVector& center() const { return c_; }
    const PadicMatrix& frame() const { return m_; }
    const std::vector<long>& radius_exponents() const { return r_; }
    const std::string& label() const { return label_; }

    bool contains(const PadicVector& x) const {
        PadicVector lam = inv_ * (x - c_);
        for (int k = 0; k < dim(); ++k) {
            const PadicScalar& l = lam[k];
            if (!l.is_zero() && l.valuation() < r_[static_cast<size_t>(k)]) return false;
        }
        return true;
    }

    // Coordinates of x in the frame, exact.
    PadicVector solve(const PadicVector& x) const { return inv_ * (x - c_); }

    AffineBox translated(const PadicVector& v) const {
        return AffineBox(c_ + v, m_, r_, label_);
    }
    AffineBox mapped(const PadicMatrix& a) const {
        return AffineBox(a * c_, a * m_, r_, label_);
    }

private:
    PadicVector c_;
    PadicMatrix m_;
    PadicMatrix inv_;
    std::vector<long> r_;
    std::string label_;
};

// U_{I,t}^zeta = { zeta(t) + sum_k lambda_k zeta^{(k)}(t) : |lambda_k| <= rho^k },
// rho = p^{-rho_exp} the radius of I.  For the moment curve with p > n this
// set does not depend on the anchor t within I.
inline AffineBox anisotropic_cap(const PolyCurve& zeta, const PadicScalar& t, int rho_exp) {
    std::vector<long> radii;
    for (int k = 1; k <= zeta.dim(); ++k) radii.push_back(static_cast<long>(k) * rho_exp);
    return AffineBox(zeta.eval(t), zeta.jet_matrix(t), std::move(radii), "U_I");
}

// U'_{I,theta} = { x : |x_j - gamma_j(theta)|_p <= delta^j }, delta = p^{-l}.
inline AffineBox axis_cap(const PolyCurve& zeta, const PadicScalar& theta, int l) {
    std::vector<long> radii;
    for (int j = 1; j <= zeta.dim(); ++j) radii.push_back(static_cast<long>(j) * l);
    return AffineBox(zeta.eval(theta),
                     PadicMatrix::identity(zeta.dim(), zeta.prime(), zeta.precision()),
                     std::move(radii), "U'_I");
}

// tau_theta = A_{theta,delta}[Z_p^n] with the scalar delta = p^{-k}: the
// frequency plate with m directions of radius delta^{-1} = p^{k} along
// gamma^{(1..m)}(theta) and n-m of radius 1.
inline AffineBox frequency_plate(const PolyCurve& zeta, const PadicScalar& theta, int delta_exp,
                                 int m) {
    const long p = zeta.prime();
    const int prec = zeta.precision();
    PadicScalar delta = PadicScalar::from_unit(-delta_exp, BigInt(1), p, prec);
    DerivativeFrame fr = derivative_frame(zeta, theta, delta, m);
    return AffineBox(PadicVector::zeros(zeta.dim(), p, prec), fr.matrix,
                     std::vector<long>(static_cast<size_t>(zeta.dim()), 0), "tau");
}

// Tube c_T + A_{theta,delta}^{-T}[Z_p^n], delta = p^{-k}: the tilted
// delta^m x 1^{n-m} box that is exactly the Z_p^n-intersected preimage of a
// delta-ball under the projection along gamma^{(1..m)}(theta).
inline AffineBox tube(const PolyCurve& zeta, const PadicScalar& theta, int delta_exp, int m,
                      const PadicVector& center) {
    PadicScalar delta = PadicScalar::from_unit(-delta_exp, BigInt(1), zeta.prime(),
                                               zeta.precision());
    DerivativeFrame fr = derivative_frame(zeta, theta, delta, m);
    PadicMatrix dual = fr.matrix.inverse().transpose();
    return AffineBox(center, std::move(dual),
                     std::vector<long>(static_cast<size_t>(zeta.dim()), 0), "T");
}

}  // namespace padiclab
