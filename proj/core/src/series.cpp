#include "camp/series.hpp"

#include <stdexcept>

#include "camp/detail/series_ops.hpp"

namespace camp {

Series::Series(std::initializer_list<double> values, std::size_t horizon)
    : coeffs_(horizon + 1, 0.0) {
    if (values.size() > horizon + 1)
        throw std::invalid_argument("Series: more values than horizon allows");
    std::size_t t = 0;
    for (double v : values) coeffs_[t++] = v;
}

Series::Series(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("Series: empty coefficient vector");
}

Series Series::identity(std::size_t horizon) {
    Series s(horizon);
    s.coeffs_[0] = 1.0;
    return s;
}

double Series::at(long t) const { return detail::series_at(coeffs_, t); }

Series Series::convolve(const Series& other) const {
    return Series(detail::series_convolve(coeffs_, other.coeffs_));
}

Series Series::add(const Series& other) const {
    return Series(detail::series_add(coeffs_, other.coeffs_));
}

Series Series::sub(const Series& other) const {
    return Series(detail::series_sub(coeffs_, other.coeffs_));
}

Series Series::shift(std::size_t k) const {
    return Series(detail::series_shift(coeffs_, k));
}

Series Series::scale(double factor) const {
    Series out(*this);
    for (double& c : out.coeffs_) c *= factor;
    return out;
}

Series Series::divide(const Series& other) const {
    return Series(detail::series_divide(coeffs_, other.coeffs_));
}

}  // namespace camp
