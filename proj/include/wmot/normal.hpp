#pragma once

namespace wmot {

// Standard normal density, CDF and quantile. The CDF is erfc-based and
// accurate to ~1e-15 relative; the quantile is Acklam's rational
// approximation polished with one Halley step.
double normal_pdf(double z);
double normal_cdf(double z);

// Left-continuous inverse of normal_cdf on (0,1). Values outside (0,1)
// throw std::domain_error; u==0 / u==1 map to -inf / +inf.
double normal_quantile(double u);

}  // namespace wmot
