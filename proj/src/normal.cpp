#include "binfam/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binfam/errors.hpp"

namespace binfam {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kTwoPi = 6.2831853071795864769;
}  // namespace

double normal_pdf(double y) { return kInvSqrt2Pi * std::exp(-0.5 * y * y); }

double phi1(double y) { return 0.5 * std::erfc(-y * kInvSqrt2); }

double phi1_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("phi1_inv requires p in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) *
                    r +
                4.5921953931549871457e4) *
                   r +
               1.3731693765509461125e4) *
                  r +
              1.9715909503065514427e3) *
                 r +
             1.3314166789178437745e2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) *
                    r +
                2.1213794301586595867e4) *
                   r +
               5.3941960214247511077e3) *
                  r +
              6.8718700749205790830e2) *
                 r +
             4.2313330701600911252e1) *
                r +
            1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e0) *
                    r +
                3.64784832476320460504e0) *
                   r +
               5.76949722146069140550e0) *
                  r +
              4.63033784615654529590e0) *
                 r +
             1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e0) *
                  r +
              2.05319162663775882187e0) *
                 r +
             1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e0) *
                  r +
              5.46378491116411436990e0) *
                 r +
             6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
  }
  return q < 0.0 ? -value : value;
}

double binormal_pdf(double y1, double y2, double sigma) {
  const double omr2 = (1.0 - sigma) * (1.0 + sigma);
  if (omr2 <= 0.0) throw std::domain_error("binormal_pdf requires |sigma| < 1");
  const double quad = (y1 * y1 - 2.0 * sigma * y1 * y2 + y2 * y2) / omr2;
  return std::exp(-0.5 * quad) / (kTwoPi * std::sqrt(omr2));
}

namespace {

// Gauss-Legendre half-nodes and weights used by Genz's hybrid scheme.
constexpr double kGl6W[3] = {1.7132449237916975e-01, 3.6076157304813894e-01, 4.6791393457269137e-01};
constexpr double kGl6X[3] = {-9.3246951420315205e-01, -6.6120938646626448e-01, -2.3861918608319693e-01};
constexpr double kGl12W[6] = {4.7175336386512022e-02, 1.0693932599531888e-01, 1.6007832854334611e-01,
                              2.0316742672306565e-01, 2.3349253653835464e-01, 2.4914704581340269e-01};
constexpr double kGl12X[6] = {-9.8156063424671924e-01, -9.0411725637047480e-01, -7.6990267419430469e-01,
                              -5.8731795428661748e-01, -3.6783149899818018e-01, -1.2523340851146891e-01};
constexpr double kGl20W[10] = {1.7614007139153273e-02, 4.0601429800386217e-02, 6.2672048334109443e-02,
                               8.3276741576704671e-02, 1.0193011981724026e-01, 1.1819453196151825e-01,
                               1.3168863844917653e-01, 1.4209610931838187e-01, 1.4917298647260366e-01,
                               1.5275338713072578e-01};
constexpr double kGl20X[10] = {-9.9312859918509488e-01, -9.6397192727791381e-01, -9.1223442825132584e-01,
                               -8.3911697182221878e-01, -7.4633190646015080e-01, -6.3605368072651502e-01,
                               -5.1086700195082713e-01, -3.7370608871541955e-01, -2.2778585114164510e-01,
                               -7.6526521133497338e-02};

}  // namespace

double phi2(double y1, double y2, double sigma) {
  if (!(sigma >= -1.0 && sigma <= 1.0)) throw std::domain_error("phi2 requires |sigma| <= 1");
  if (std::isnan(y1) || std::isnan(y2)) return std::numeric_limits<double>::quiet_NaN();

  // Exact coupling limits.
  if (sigma == 1.0) return std::min(phi1(y1), phi1(y2));
  if (sigma == -1.0) return std::max(phi1(y1) + phi1(y2) - 1.0, 0.0);
  if (sigma == 0.0) return phi1(y1) * phi1(y2);

  const double* xw;
  const double* xx;
  int ng;
  const double asig = std::fabs(sigma);
  if (asig < 0.3) {
    xw = kGl6W, xx = kGl6X, ng = 3;
  } else if (asig < 0.75) {
    xw = kGl12W, xx = kGl12X, ng = 6;
  } else {
    xw = kGl20W, xx = kGl20X, ng = 10;
  }

  double h = -y1;
  double k = -y2;
  double hk = h * k;
  double bvn = 0.0;

  if (asig < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(sigma);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double sn = std::sin(asr * (is * xx[i] + 1.0) * 0.5);
        bvn += xw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + phi1(-h) * phi1(-k);
  } else {
    if (sigma < 0.0) {
      k = -k;
      hk = -hk;
    }
    const double ass = (1.0 - sigma) * (1.0 + sigma);
    double a = std::sqrt(ass);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -0.5 * (bs / ass + hk);
    if (asr > -100.0)
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - ass) * (1.0 - d * bs / 5.0) / 3.0 + c * d * ass * ass / 5.0);
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-0.5 * hk) * std::sqrt(kTwoPi) * phi1(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double x = a * (is * xx[i] + 1.0);
        const double xs = x * x;
        const double rs = std::sqrt(1.0 - xs);
        asr = -0.5 * (bs / xs + hk);
        if (asr > -100.0) {
          bvn += a * xw[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn /= -kTwoPi;
    if (sigma > 0.0) {
      bvn += phi1(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) {
        // Evaluate the tail difference where phi1 is most accurate.
        if (h >= 0.0)
          bvn += phi1(-h) - phi1(-k);
        else
          bvn += phi1(k) - phi1(h);
      }
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace binfam
