#pragma once

#include <string>

namespace fracdrift {

/// Number format used by every report and CSV: 17 significant digits,
/// "." decimal point, independent of the global locale.
std::string fmt17(double x);

}  // namespace fracdrift
