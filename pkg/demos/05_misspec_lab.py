"""Misspecification laboratory: filtering an AR(1) shock as if it were MA(1).

The true shock follows x_t = gamma x_{t-1} + omega_t, but the researcher
fits an MA(1) and recovers the filtered innovation omega*_t and the implied
regressor z*_t = theta* omega*_t. The lab reports the pseudo-true root
theta*, the closed-form variance of omega*, and the omitted-term covariance
cov(z*, z - z*) that drives the bias of a regression on z* in place of the
correct z -- all checked against Monte Carlo.
"""

from eulergmm.misspec import (
    MisspecConfig,
    bias_demo,
    closed_form_cov,
    monte_carlo_cov,
    pseudo_true_theta,
)


def main():
    for gamma in (0.1, 0.25, 0.4):
        cfg = MisspecConfig(gamma=gamma, zeta_true=1.0, T=100_000, reps=10, seed=0)
        theta = pseudo_true_theta(gamma)
        pt = closed_form_cov(theta, 1.0)
        mc_cov, mc_se = monte_carlo_cov(cfg)
        demo = bias_demo(cfg)
        print(f"gamma = {gamma}:")
        print(f"  pseudo-true theta*          {theta:.6f}")
        print(f"  var(omega*) closed form     {pt.var_omega_star:.6f}")
        print(f"  cov(z*, z-z*) closed form   {pt.cov_zstar_err:+.6f}")
        print(f"  cov(z*, z-z*) Monte Carlo   {mc_cov:+.6f} (se {mc_se:.1e})")
        print(
            f"  slope on z* (misspecified)  {demo['zeta_hat_misspecified']:.4f}"
            f"  vs on z (correct) {demo['zeta_hat_correct']:.4f}"
        )
        print(f"  stated closed-form plim     {demo['theoretical_plim']:.4f}\n")

    print(
        "Note the sign: the simulated covariance is small and negative, so the\n"
        "actual attenuation of the misspecified slope is mild -- the stated\n"
        "closed-form plim overstates it. The Monte Carlo is the ground truth\n"
        "here; the closed forms are reported exactly as stated for comparison."
    )


if __name__ == "__main__":
    main()
