#include "mcflab/functionals.hpp"

#include <iomanip>
#include <sstream>

namespace mcflab {

std::string to_csv_row(const FunctionalReport& report)
{
    std::ostringstream out;
    out << std::setprecision(12) << report.name << ',' << report.value;
    for (int k = 0; k < 3; ++k) {
        out << ',';
        if (report.argmax_point && k < report.argmax_point->size()) {
            out << (*report.argmax_point)[k];
        }
    }
    out << ',';
    if (report.argmax_scale) {
        out << *report.argmax_scale;
    }
    out << ',' << report.error_estimate << ',' << report.evaluations;
    return out.str();
}

} // namespace mcflab
