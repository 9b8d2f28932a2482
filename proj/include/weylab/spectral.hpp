#ifndef WEYLAB_SPECTRAL_HPP
#define WEYLAB_SPECTRAL_HPP

#include <Eigen/Dense>
#include <string>

#include "weylab/errors.hpp"

namespace weylab {

/// Ascending eigenvalue list with a trusted-prefix cutoff. Only the trusted
/// prefix may feed counting functions and heat traces.
struct SpectralData {
  Eigen::VectorXd eigenvalues;  // ascending
  int trusted_count = 0;
  std::string source;

  int size() const { return int(eigenvalues.size()); }
  double trusted_ceiling() const {
    if (trusted_count <= 0) throw RangeError("SpectralData: empty trusted prefix");
    return eigenvalues[trusted_count - 1];
  }
  void validate() const {
    for (int i = 1; i < size(); ++i)
      if (eigenvalues[i] < eigenvalues[i - 1])
        throw InputError("SpectralData: eigenvalues not ascending");
    if (trusted_count > size()) throw InputError("SpectralData: trusted_count > size");
  }
};

}  // namespace weylab

#endif  // WEYLAB_SPECTRAL_HPP
