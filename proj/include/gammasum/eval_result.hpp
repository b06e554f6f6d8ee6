#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace gammasum {

enum class Method { series, inversion, reduction };

constexpr std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::series: return "series";
        case Method::inversion: return "inversion";
        case Method::reduction: return "reduction";
    }
    return "unknown";
}

/// A function value together with an absolute error estimate and the
/// evaluation route that produced it.
struct EvalResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    Method method = Method::series;
    std::size_t terms_or_nodes = 0;
    std::string warning;  // empty unless something noteworthy happened (e.g. clamping)
};

}  // namespace gammasum
