#pragma once

namespace uowsn {

/// Principal branch W0 of the Lambert W function for x >= 0.
///
/// Halley iteration from a logarithmic starting point; stops when the relative
/// update falls below 1e-14 or after 50 iterations. Throws std::domain_error
/// for negative or non-finite arguments.
double lambert_w0(double x);

}  // namespace uowsn
