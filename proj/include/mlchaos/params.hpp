#pragma once

#include <optional>
#include <utility>

namespace mlchaos {

/// Scalar parameters of the forced May-Leonard system and of its return maps.
///
/// The global-map constants (mu*, Delta*) cannot be derived from the vector
/// field; they are configuration inputs with the defaults below.
struct ModelParams {
    double c = 0.6;        ///< contraction rate, 0 < e < c < 1
    double e = 0.2;        ///< expansion rate
    double gamma = 0.0;    ///< forcing amplitude >= 0
    double omega = 0.3;    ///< forcing angular frequency > 0

    double mu = 1.0;
    double mu1 = 1.0;
    double mu2 = 0.1;
    double mu3 = 1.0;
    double mu4 = 0.1;
    double mu5 = 0.1;
    double Delta1 = 1.0;
    double Delta2 = 1.0;
    double Delta3 = 1.0;

    double eps_tilde = 0.1;  ///< cross-section size, (0, 1]

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Quantities derived in closed form from ModelParams.
struct DerivedConstants {
    double delta = 0;    ///< saddle value c/e
    double xi = 0;       ///< (e^2 + ce + c^2) / e^3
    double a1 = 0;
    double a2 = 0;
    double b1 = 0;
    double b2 = 0;
    double sqrt_a1 = 0;
    double p = 0;        ///< rescaling exponent (delta - 1) / delta
    double K_omega = 0;  ///< omega * p / pi
    std::optional<double> x_star;  ///< stable fixed point of x -> x^delta + gamma
};

DerivedConstants derive_constants(const ModelParams& params);

/// a1(omega) = c^2 / (c^2 + 4 omega^2) and its companions, for limit studies.
struct TrigCoefficients {
    double a1, a2, b1, b2;
};
TrigCoefficients trig_coefficients(double c, double e, double omega);

/// Bounds for the finite Diophantine check |m c - n e| > d1 (|m|+|n|)^-d2.
struct DiophantineCheckSpec {
    double d1 = 0;
    double d2 = 0;
    int n_max = 2;

    void validate() const;
};

struct DiophantineReport {
    bool c1a = false;
    bool c1b_up_to_n_max = false;  ///< holds for every pair with 0 < |m|+|n| <= n_max
    std::pair<int, int> worst_pair{0, 0};
    double worst_margin = 0;
};

DiophantineReport check_c1a_c1b(const ModelParams& params, const DiophantineCheckSpec& spec);

/// x cos a + y sin a == amplitude * cos(phase + a) for every angle a.
struct TrigCollapse {
    double amplitude;
    double phase;  ///< in [0, 2 pi)
};

TrigCollapse trig_collapse(double xc, double yc);

/// Residuals of the closed-form identities between the derived constants,
/// evaluated at a finite (c, e, omega). Limits are probed at omega_small and
/// omega_large. Every field is a relative residual that should vanish.
struct IdentityResiduals {
    double pythagorean_1;   ///< a1^2 + b1^2 - a1
    double pythagorean_2;   ///< a2^2 + b2^2 - a2
    double small_omega;     ///< max of |a_i - 1|, |b_i| at omega_small
    double large_omega;     ///< max of |a_i|, |b_i| at omega_large
    double xi_identity;     ///< e xi vs 1+d+d^2 and c xi vs d(1+d+d^2)
    double sqrt_a2_ratio;   ///< sqrt(a2) * 2 omega / e -> 1 at omega_large
    double sqrt_a2_diff;    ///< sqrt(a2) - e / (2 omega) -> 0 at omega_large
    double b2_over_a2;      ///< b2/a2 vs 2 omega / e

    double max() const;
};

IdentityResiduals check_constant_identities(double c, double e, double omega,
                                            double omega_small = 1e-14, double omega_large = 1e12);

}  // namespace mlchaos
