#ifndef NFT_GAMMA_HPP
#define NFT_GAMMA_HPP

#include <complex>

namespace nft {

/// log Gamma(z) for complex z (Stirling series with upward recurrence, reflection for Re z < 1/2).
/// The imaginary part is not reduced to a principal branch; exp() of the
/// result is Gamma(z). Returns a non-finite value at the poles z = 0, -1, ...
std::complex<double> lgamma_complex(std::complex<double> z);

/// Gamma(z) for complex z.
std::complex<double> gamma_complex(std::complex<double> z);

}  // namespace nft

#endif  // NFT_GAMMA_HPP
