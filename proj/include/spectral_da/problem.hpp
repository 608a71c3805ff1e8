#pragma once

#include <utility>

#include "spectral_da/coeff_seq.hpp"
#include "spectral_da/spectrum.hpp"

namespace spectral_da {

// One assimilation cycle with the whole state observed: forecast mean and
// covariance spectrum, observation noise spectrum, and the data vector, all
// expressed in the shared eigenbasis. The same structure backs the
// least-squares, gain, and Bayesian views (the prior spectrum doubles as the
// background covariance).
struct AssimilationProblem {
    CoeffSeq prior_mean;
    SpectrumModel prior_spectrum;
    SpectrumModel noise_spectrum;
    CoeffSeq data;
};

}  // namespace spectral_da
