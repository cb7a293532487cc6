#pragma once

#include "rfcd/vec.hpp"

namespace rfcd {

/// One field query result: emitted color in [0,1] per channel and
/// nonnegative volume density (1/meter).
struct RadianceSample {
    Vec3 color{0, 0, 0};
    double density = 0.0;
};

/// A queryable radiance field. Implementations must be safe for
/// concurrent read-only use.
class RadianceField {
public:
    virtual ~RadianceField() = default;
    virtual RadianceSample query(const Vec3& x, const Vec3& d) const = 0;
};

}  // namespace rfcd
