#include "mlchaos/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "mlchaos/error.hpp"

namespace mlchaos {

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol) {
    QuadratureResult r;
    if (a == b) return r;
    const double sign = a < b ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    r.value = sign * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                         f, lo, hi, 25, rel_tol * 0.1, &r.error, &r.l1);
    if (!std::isfinite(r.value) || r.error > std::max(abs_tol, rel_tol * r.l1)) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << lo << ", " << hi
            << "]: error estimate " << r.error;
        throw NumericError(msg.str());
    }
    return r;
}

}  // namespace mlchaos
