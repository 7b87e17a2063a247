#include "schoenberg/copper.hpp"

#include <fmt/format.h>

namespace schoenberg {

Configuration copper_configuration() {
    Configuration c;
    c.coords.resize(static_cast<Eigen::Index>(kCopper.size()), 1);
    for (std::size_t i = 0; i < kCopper.size(); ++i) {
        c.coords(static_cast<Eigen::Index>(i), 0) = kCopper[i];
        c.labels.push_back(fmt::format("{:.2f}", kCopper[i]));
    }
    return c;
}

}  // namespace schoenberg
