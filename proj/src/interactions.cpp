#include "opinion/interactions.hpp"

namespace opinion {

double sample_noise(NoiseSpec const& spec, Rng& rng)
{
    double const a = spec.support();
    if (a == 0.0)
        return 0.0;
    std::uniform_real_distribution<double> dist(-a, a);
    return dist(rng);
}

BoundCertificate bound_certificate(CertificateInput const& in)
{
    BoundCertificate cert;
    cert.r = in.leader_kernel.minimum();
    cert.d_minus = in.leader_diffusion.lower_room();
    cert.d_plus = in.leader_diffusion.upper_room();
    cert.k_minus = in.follower_leader_diffusion.lower_room();
    cert.k_plus = in.follower_leader_diffusion.upper_room();

    double const half_beta = 0.5 * in.beta;
    cert.control_ok = in.alpha * cert.r >= half_beta;

    double const a_ll = in.leader_noise.support();
    cert.leader_noise_ok = a_ll <= cert.d_minus * (1.0 - half_beta)
                           && a_ll <= cert.d_plus * (1.0 - half_beta);

    double const a_fl = in.follower_leader_noise.support();
    cert.follower_leader_noise_ok = a_fl <= (1.0 - in.alpha) * cert.k_minus
                                    && a_fl <= (1.0 - in.alpha) * cert.k_plus;

    double const a_ff = in.follower_noise.support();
    cert.follower_noise_ok = a_ff <= (1.0 - in.alpha) * in.follower_diffusion.lower_room()
                             && a_ff <= (1.0 - in.alpha) * in.follower_diffusion.upper_room();
    return cert;
}

}  // namespace opinion
