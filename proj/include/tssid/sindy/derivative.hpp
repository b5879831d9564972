#pragma once

#include <span>
#include <string>
#include <vector>

namespace tssid::sindy {

enum class DerivativeMethod { Central, SmoothedCentral };

std::string to_string(DerivativeMethod method);
DerivativeMethod derivative_method_from_string(const std::string& s);

/// Least-squares polynomial (Savitzky-Golay) smoother. Edge samples take the
/// value of the polynomial fitted to the first/last full window. Series
/// shorter than the window are returned unchanged.
std::vector<double> savgol_smooth(std::span<const double> series, int window = 7, int order = 3);

/// Second-order central differences in the interior and second-order
/// one-sided differences at both ends. SmoothedCentral runs savgol_smooth
/// (window 7, order 3) first. Requires at least 3 samples.
std::vector<double> differentiate(std::span<const double> series, double dt,
                                  DerivativeMethod method = DerivativeMethod::SmoothedCentral);

}  // namespace tssid::sindy
