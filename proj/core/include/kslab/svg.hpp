#pragma once

#include <string>
#include <vector>

namespace kslab {

/// One plotted series. Points with nonpositive coordinates cannot live on a
/// log axis; callers mark such points by putting them in a series with
/// `pinned = true`, which draws open markers on the lower plot edge.
struct SvgSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
    bool pinned = false;
};

/// Static log-log scatter/line plot. No runtime dependencies; output bytes
/// depend only on the inputs.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace kslab
