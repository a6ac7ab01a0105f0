#pragma once

namespace binfam {

// Standard normal density and cumulative distribution function.
double normal_pdf(double y);
double phi1(double y);

// Inverse of phi1 on (0,1). Wichura's algorithm AS 241 (PPND16),
// accurate to about 1e-15 relative error.
double phi1_inv(double p);

// Bivariate standard normal density with correlation sigma in (-1,1).
double binormal_pdf(double y1, double y2, double sigma);

// P(Y1 <= y1, Y2 <= y2) for standard bivariate normal with correlation
// sigma in [-1,1]. Hybrid quadrature after Drezner & Wesolowsky (1990)
// as refined by Genz (2004) / West (2004); absolute error below 1e-14.
double phi2(double y1, double y2, double sigma);

}  // namespace binfam
