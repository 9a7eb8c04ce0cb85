#pragma once

#include "sparseimg/types.hpp"

namespace sparseimg {

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Complex aperture diffraction integral
///   F(beta, eta) = int_{-1/2}^{1/2} exp(-i beta t - i eta t^2) dt,
/// evaluated by composite Gauss-Legendre quadrature to ~1e-10 relative
/// accuracy. F is even in beta and conjugated under eta -> -eta.
cdouble fresnel_integral(double beta, double eta);

/// Modulus |F(beta, eta)|, in [0, 1]. Satisfies U(beta, 0) = |sinc(beta/2)|.
double fresnel_u(double beta, double eta);

struct FresnelEval {
  double beta = 0.0;
  double eta = 0.0;
  double value = 0.0;
  int quadrature_panels = 0;
};

/// Like fresnel_u but reports the panel count used.
FresnelEval fresnel_eval(double beta, double eta);

}  // namespace sparseimg
